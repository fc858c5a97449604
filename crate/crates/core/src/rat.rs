//! Arbitrary-precision rational scalars and `p/q` text conversion.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::CoreError;

/// Scalar type used throughout the kernel.
pub type Rat = BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p` or `p/q` (always in lowest terms, `q > 0`).
pub fn to_text(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        let mut s = r.numer().to_string();
        s.push('/');
        s.push_str(&r.denom().to_string());
        s
    }
}

/// Parses `p`, `-p/q` or `p/q`. Whitespace around the numbers is accepted.
pub fn from_text(text: &str) -> Result<Rat, CoreError> {
    let bad = || CoreError::BadRational {
        text: String::from(text),
    };
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .ok_or_else(bad)?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

/// True if `r` is a non-negative integer.
pub fn is_nonneg_int(r: &Rat) -> bool {
    r.denom().is_one() && !r.numer().is_negative()
}
