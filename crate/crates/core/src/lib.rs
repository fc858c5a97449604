//! Exact-arithmetic kernel for building Mellin representations of
//! Feynman-type parametric integrals.
//!
//! Everything in this crate is computed over arbitrary-precision rationals:
//! graph polynomials (Symanzik `U`/`V` and their hyperbolic analogues built
//! from Pfaffian minors), the Mellin integrand data, the convergence-domain
//! linear programs, and the dimensional pole scan. No floating point enters
//! at any stage; numerical evaluation lives in the companion crate.
//!
//! The crate is `no_std` (with `alloc`) so the kernel can be embedded
//! anywhere; IO, file formats and quadrature are deliberately out of scope
//! here.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod mellin;
pub mod poles;
pub mod poly;
pub mod rat;

pub use error::CoreError;
pub use rat::Rat;
