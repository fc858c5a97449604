//! Graph polynomials as exact monomial sums.
//!
//! Two families are built here. For ordinary scalar graphs, the Symanzik
//! polynomials `U` (spanning trees) and `V` (spanning two-forests weighted
//! by kinematic invariants). For vulcanized matrix models with Mehler-kernel
//! propagators, the hyperbolic polynomials in t = tanh(a/2): `HU` and the
//! real/imaginary parts of `HV`, all given by Pfaffian minor sums over
//! subsets of the internal index space.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::graph::FeynmanGraph;
use crate::linalg::{
    signature_pair, signature_set, signature_single, AntisymMatrix, PfaffianTable,
};
use crate::rat::{int, Rat};

/// One term of a polynomial over the line variables.
///
/// `symbol` tags terms that carry an external invariant as a factor; the
/// numeric value of that invariant, when known, lives in the enclosing
/// [`PolynomialSum::symbol_values`] table. `origin` records which tree or
/// index subset produced the term (diagnostics only; cleared when terms
/// from different origins merge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Rat,
    /// One exponent per line, each 0, 1 or 2.
    pub exponents: Vec<u8>,
    pub symbol: Option<String>,
    pub origin: Option<String>,
}

/// A polynomial in the line variables, in a canonical merged form: no two
/// terms share the same (exponents, symbol) key, no term has a zero
/// coefficient, and terms are sorted by that key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialSum {
    name: String,
    num_lines: usize,
    monomials: Vec<Monomial>,
    symbol_values: BTreeMap<String, Rat>,
}

impl PolynomialSum {
    pub fn new(
        name: &str,
        num_lines: usize,
        monomials: Vec<Monomial>,
        symbol_values: BTreeMap<String, Rat>,
    ) -> Result<Self, CoreError> {
        let mut merged: BTreeMap<(Vec<u8>, Option<String>), Monomial> = BTreeMap::new();
        for m in monomials {
            if m.exponents.len() != num_lines {
                return Err(CoreError::LineCountMismatch {
                    name: String::from(name),
                    expected: num_lines,
                    got: m.exponents.len(),
                });
            }
            if let Some(&e) = m.exponents.iter().find(|&&e| e > 2) {
                return Err(CoreError::ExponentOutOfRange {
                    exponent: e as i64,
                });
            }
            let key = (m.exponents.clone(), m.symbol.clone());
            match merged.get_mut(&key) {
                None => {
                    merged.insert(key, m);
                }
                Some(prev) => {
                    prev.coeff += m.coeff;
                    if prev.origin != m.origin {
                        prev.origin = None;
                    }
                }
            }
        }
        let monomials: Vec<Monomial> = merged
            .into_values()
            .filter(|m| !m.coeff.is_zero())
            .collect();
        Ok(Self {
            name: String::from(name),
            num_lines,
            monomials,
            symbol_values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn symbol_values(&self) -> &BTreeMap<String, Rat> {
        &self.symbol_values
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Multiplies every symbol-tagged term by its numeric value, leaving a
    /// plain polynomial. Values in `extra` override the stored table.
    pub fn substitute(&self, extra: &BTreeMap<String, Rat>) -> Result<Self, CoreError> {
        let mut out = Vec::with_capacity(self.monomials.len());
        for m in &self.monomials {
            let mut m = m.clone();
            if let Some(sym) = m.symbol.take() {
                let value = extra
                    .get(&sym)
                    .or_else(|| self.symbol_values.get(&sym))
                    .ok_or(CoreError::MissingSymbolValue { symbol: sym })?;
                m.coeff *= value;
            }
            out.push(m);
        }
        Self::new(&self.name, self.num_lines, out, BTreeMap::new())
    }

    /// Exact value at a rational point, resolving symbols from the stored
    /// table (plus `extra`).
    pub fn eval_rat(&self, point: &[Rat], extra: &BTreeMap<String, Rat>) -> Result<Rat, CoreError> {
        if point.len() != self.num_lines {
            return Err(CoreError::LineCountMismatch {
                name: self.name.clone(),
                expected: self.num_lines,
                got: point.len(),
            });
        }
        let plain = self.substitute(extra)?;
        let mut acc = Rat::zero();
        for m in &plain.monomials {
            let mut term = m.coeff.clone();
            for (t, &e) in point.iter().zip(&m.exponents) {
                for _ in 0..e {
                    term *= t;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Largest total degree over the terms (0 for the empty polynomial).
    pub fn max_total_degree(&self) -> u32 {
        self.monomials
            .iter()
            .map(|m| m.exponents.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }
}

/// First Symanzik polynomial: one term per spanning tree, with exponent 1
/// on every line left out of the tree.
pub fn symanzik_u(g: &FeynmanGraph) -> Result<PolynomialSum, CoreError> {
    let trees = g.spanning_trees()?;
    let monomials = trees
        .trees
        .iter()
        .map(|tree| Monomial {
            coeff: Rat::one(),
            exponents: complement_exponents(g.num_lines(), tree),
            symbol: None,
            origin: Some(format!("tree {tree:?}")),
        })
        .collect();
    PolynomialSum::new("U", g.num_lines(), monomials, BTreeMap::new())
}

/// Second Symanzik polynomial: one term per spanning two-forest whose cut
/// separates the external legs, tagged with the invariant of that split.
/// Forests with all legs on one side carry no momentum flow and are
/// dropped; a genuine split with no declared invariant is an error.
pub fn symanzik_v(g: &FeynmanGraph) -> Result<PolynomialSum, CoreError> {
    let mut monomials = Vec::new();
    for tt in g.two_trees()? {
        let (la, lb) = &tt.leg_split;
        if la.is_empty() || lb.is_empty() {
            continue;
        }
        let side: BTreeSet<String> = la.iter().cloned().collect();
        let symbol = g
            .invariant_for(&side)
            .ok_or_else(|| CoreError::MissingInvariant {
                split: la.clone(),
            })?;
        monomials.push(Monomial {
            coeff: Rat::one(),
            exponents: complement_exponents(g.num_lines(), &tt.lines),
            symbol: Some(String::from(symbol)),
            origin: Some(format!("2-forest {:?}", tt.lines)),
        });
    }
    PolynomialSum::new("V", g.num_lines(), monomials, BTreeMap::new())
}

fn complement_exponents(num_lines: usize, kept_ids: &[u32]) -> Vec<u8> {
    (1..=num_lines as u32)
        .map(|id| if kept_ids.contains(&id) { 0 } else { 1 })
        .collect()
}

/// Which matrix model a [`RibbonData`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RibbonModel {
    GrosseWulkenhaar,
    Lsz,
}

impl RibbonModel {
    pub fn label(&self) -> &'static str {
        match self {
            RibbonModel::GrosseWulkenhaar => "GW",
            RibbonModel::Lsz => "LSZ",
        }
    }
}

/// Matrix-mode input for a ribbon graph: the antisymmetric internal form
/// `B`, the external/internal coupling `P` (one row per external component,
/// one column per internal index), and the counts entering the weights.
#[derive(Debug, Clone)]
pub struct RibbonData {
    pub model: RibbonModel,
    pub b: AntisymMatrix,
    pub p: Vec<Vec<Rat>>,
    pub num_lines: usize,
    pub faces: i64,
    pub genus: i64,
    pub weight: Rat,
    pub parity_n: i64,
}

impl RibbonData {
    pub fn new(
        model: RibbonModel,
        b: AntisymMatrix,
        p: Vec<Vec<Rat>>,
        num_lines: usize,
        faces: i64,
        genus: i64,
        weight: Rat,
        parity_n: i64,
    ) -> Result<Self, CoreError> {
        if num_lines == 0 {
            return Err(CoreError::BadLineCount { lines: 0 });
        }
        if faces < 1 {
            return Err(CoreError::BadFaceCount { faces });
        }
        if genus < 0 {
            return Err(CoreError::BadGenus { genus });
        }
        match model {
            RibbonModel::GrosseWulkenhaar => {
                // The internal index space is L short plus L long variables.
                if b.dim() != 2 * num_lines {
                    return Err(CoreError::WrongMatrixDimension {
                        expected: 2 * num_lines,
                        got: b.dim(),
                    });
                }
            }
            RibbonModel::Lsz => {
                if b.dim() < num_lines {
                    return Err(CoreError::MatrixTooSmall {
                        need: num_lines,
                        got: b.dim(),
                    });
                }
            }
        }
        for (row, entries) in p.iter().enumerate() {
            if entries.len() != b.dim() {
                return Err(CoreError::RaggedCoupling {
                    row,
                    expected: b.dim(),
                    got: entries.len(),
                });
            }
        }
        Ok(Self {
            model,
            b,
            p,
            num_lines,
            faces,
            genus,
            weight,
            parity_n,
        })
    }

    fn require_model(&self, expected: RibbonModel) -> Result<(), CoreError> {
        if self.model != expected {
            return Err(CoreError::ModelMismatch {
                expected: String::from(expected.label()),
                got: String::from(self.model.label()),
            });
        }
        Ok(())
    }

    /// Weight s^(2g - k) with k = |K| - L - F + 1; negative exponents mean
    /// the input counts are inconsistent for this contributing subset.
    fn subset_weight(&self, k_set: &[usize]) -> Result<Rat, CoreError> {
        let k = k_set.len() as i64 - self.num_lines as i64 - self.faces + 1;
        let e = 2 * self.genus - k;
        if e < 0 {
            return Err(CoreError::NegativeWeightExponent {
                mask: k_set.to_vec(),
                exponent: e,
            });
        }
        Ok(num_traits::pow(self.weight.clone(), e as usize))
    }
}

fn mask_indices(mask: u64, dim: usize) -> Vec<usize> {
    (0..dim).filter(|i| mask >> i & 1 == 1).collect()
}

/// Exponent of each line under a subset K of the 2L short+long indices:
/// counts one unless the line's short index is in K, plus one if its long
/// index is. This is the product over lines outside I times lines in J.
fn short_long_exponents(num_lines: usize, mask: u64) -> Vec<u8> {
    (0..num_lines)
        .map(|l| {
            let in_short = mask >> l & 1 == 1;
            let in_long = mask >> (num_lines + l) & 1 == 1;
            (!in_short as u8) + (in_long as u8)
        })
        .collect()
}

fn set_label(prefix: &str, set: &[usize]) -> String {
    let mut s = String::from(prefix);
    s.push('[');
    for (i, v) in set.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{v}"));
    }
    s.push(']');
    s
}

/// Hyperbolic first polynomial of the Grosse-Wulkenhaar model: a sum over
/// subsets K of the short+long index space with parity n + |K| odd, each
/// weighted by s^(2g-k) times the squared Pfaffian of B with K deleted.
pub fn hu_gw(r: &RibbonData) -> Result<PolynomialSum, CoreError> {
    r.require_model(RibbonModel::GrosseWulkenhaar)?;
    let d = r.b.dim();
    let mut table = PfaffianTable::new(&r.b);
    let mut monomials = Vec::new();
    for mask in 0..(1u64 << d) {
        let k_set = mask_indices(mask, d);
        if (r.parity_n + k_set.len() as i64).rem_euclid(2) != 1 {
            continue;
        }
        let pf = table.of_deleted(&k_set)?;
        if pf.is_zero() {
            continue;
        }
        let coeff = r.subset_weight(&k_set)? * (&pf * &pf);
        monomials.push(Monomial {
            coeff,
            exponents: short_long_exponents(r.num_lines, mask),
            symbol: None,
            origin: Some(set_label("K", &k_set)),
        });
    }
    PolynomialSum::new("HU", r.num_lines, monomials, BTreeMap::new())
}

/// Row sums x·P restricted to one internal column.
fn coupling_dot(p: &[Vec<Rat>], externals: &[Rat], col: usize) -> Rat {
    let mut acc = Rat::zero();
    for (row, x) in p.iter().zip(externals) {
        if !x.is_zero() && !row[col].is_zero() {
            acc += x * &row[col];
        }
    }
    acc
}

fn check_externals(r: &RibbonData, externals: &[Rat]) -> Result<(), CoreError> {
    if externals.len() != r.p.len() {
        return Err(CoreError::ExternalCountMismatch {
            expected: r.p.len(),
            got: externals.len(),
        });
    }
    Ok(())
}

/// Real part of the hyperbolic second polynomial for Grosse-Wulkenhaar.
///
/// Each subset K contributes one term whose invariant is the square of the
/// cut bracket: sum over a single deleted index tau outside K of the
/// external coupling times the extraction signature times the Pfaffian of
/// B with K and tau deleted. Terms are kept symbolic (one symbol per K)
/// with the numeric square recorded in the symbol table.
pub fn hv_real_gw(r: &RibbonData, externals: &[Rat]) -> Result<PolynomialSum, CoreError> {
    r.require_model(RibbonModel::GrosseWulkenhaar)?;
    check_externals(r, externals)?;
    let d = r.b.dim();
    let mut table = PfaffianTable::new(&r.b);
    let mut monomials = Vec::new();
    let mut values = BTreeMap::new();
    for mask in 0..(1u64 << d) {
        let k_set = mask_indices(mask, d);
        // B with K and one extra index deleted has even dimension only for
        // odd |K|; all other subsets contribute vanishing Pfaffians.
        if k_set.len() % 2 != 1 {
            continue;
        }
        let mut bracket = Rat::zero();
        for tau in 0..d {
            if mask >> tau & 1 == 1 {
                continue;
            }
            let coupling = coupling_dot(&r.p, externals, tau);
            if coupling.is_zero() {
                continue;
            }
            let mut deleted = k_set.clone();
            deleted.push(tau);
            let pf = table.of_deleted(&deleted)?;
            if pf.is_zero() {
                continue;
            }
            let sig = signature_single(d, &k_set, tau)?;
            bracket += coupling * int(sig as i64) * pf;
        }
        if bracket.is_zero() {
            continue;
        }
        let symbol = set_label("sR", &k_set);
        values.insert(symbol.clone(), &bracket * &bracket);
        monomials.push(Monomial {
            coeff: Rat::one(),
            exponents: short_long_exponents(r.num_lines, mask),
            symbol: Some(symbol),
            origin: Some(set_label("K", &k_set)),
        });
    }
    PolynomialSum::new("HV_R", r.num_lines, monomials, values)
}

/// Antisymmetric 4x4 contraction block: two copies of the 2x2 rotation
/// generator on the diagonal. The overall factor i is not included here;
/// it is carried explicitly by the imaginary part downstream.
fn sigma4(a: usize, b: usize) -> i64 {
    match (a, b) {
        (0, 1) | (2, 3) => -1,
        (1, 0) | (3, 2) => 1,
        _ => 0,
    }
}

/// Imaginary part of the hyperbolic second polynomial for Grosse-Wulkenhaar.
///
/// Each even subset K contributes the set signature times Pf(B with K
/// deleted) times a double cut sum over ordered pairs (tau, tau') outside
/// K, contracted against the externals through the antisymmetric 4x4 block.
/// External components are grouped four per leg, so the external vector
/// length must be a multiple of four.
pub fn hv_imag_gw(r: &RibbonData, externals: &[Rat]) -> Result<PolynomialSum, CoreError> {
    r.require_model(RibbonModel::GrosseWulkenhaar)?;
    check_externals(r, externals)?;
    if externals.len() % 4 != 0 {
        return Err(CoreError::ExternalBlockMismatch {
            block: 4,
            got: externals.len(),
        });
    }
    let d = r.b.dim();
    let mut table = PfaffianTable::new(&r.b);
    let mut monomials = Vec::new();
    let mut values = BTreeMap::new();
    for mask in 0..(1u64 << d) {
        let k_set = mask_indices(mask, d);
        if k_set.len() % 2 != 0 {
            continue;
        }
        let pf_k = table.of_deleted(&k_set)?;
        if pf_k.is_zero() {
            continue;
        }
        // q[tau][r] = x_r P_{r tau}, the external weight feeding each cut.
        let outside: Vec<usize> = (0..d).filter(|i| mask >> *i & 1 == 0).collect();
        let mut total = Rat::zero();
        for &tau1 in &outside {
            for &tau2 in &outside {
                if tau1 == tau2 {
                    continue;
                }
                let mut deleted = k_set.clone();
                deleted.push(tau1);
                deleted.push(tau2);
                let pf = table.of_deleted(&deleted)?;
                if pf.is_zero() {
                    continue;
                }
                let sig = signature_pair(d, &k_set, tau1, tau2)?;
                // Contract the two cut columns through sigma over the
                // external component rows.
                let mut contraction = Rat::zero();
                for (ra, xa) in externals.iter().enumerate() {
                    if xa.is_zero() || r.p[ra][tau1].is_zero() {
                        continue;
                    }
                    for (rb, xb) in externals.iter().enumerate() {
                        let s = sigma4(ra % 4, rb % 4);
                        if s == 0 || xb.is_zero() || r.p[rb][tau2].is_zero() {
                            continue;
                        }
                        contraction += &r.p[ra][tau1] * xa * &r.p[rb][tau2] * xb * int(s);
                    }
                }
                total += int(sig as i64) * pf * contraction;
            }
        }
        let s_imag = int(signature_set(d, &k_set)? as i64) * pf_k * total;
        if s_imag.is_zero() {
            continue;
        }
        let symbol = set_label("sI", &k_set);
        values.insert(symbol.clone(), s_imag);
        monomials.push(Monomial {
            coeff: Rat::one(),
            exponents: short_long_exponents(r.num_lines, mask),
            symbol: Some(symbol),
            origin: Some(set_label("K", &k_set)),
        });
    }
    PolynomialSum::new("HV_I", r.num_lines, monomials, values)
}

/// Hyperbolic first polynomial of the LSZ model: subsets I of the line
/// indices with parity n + |I| odd contribute s^(2g-k) Pf(B with I
/// deleted)^2 times the product over lines in I of (1 + t^2)/(2t) times
/// the product of all t. Expanding the binomials over J inside I gives
/// exponent 0 on lines in J, 2 on lines in I outside J, 1 elsewhere, with
/// a 1/2^|I| denominator on every term.
pub fn hu_lsz(r: &RibbonData) -> Result<PolynomialSum, CoreError> {
    r.require_model(RibbonModel::Lsz)?;
    let l = r.num_lines;
    let mut table = PfaffianTable::new(&r.b);
    let mut monomials = Vec::new();
    for i_mask in 0..(1u64 << l) {
        let i_set = mask_indices(i_mask, l);
        if (r.parity_n + i_set.len() as i64).rem_euclid(2) != 1 {
            continue;
        }
        let pf = table.of_deleted(&i_set)?;
        if pf.is_zero() {
            continue;
        }
        let coeff = r.subset_weight(&i_set)? * (&pf * &pf)
            / num_traits::pow(int(2), i_set.len());
        // Submask walk over J inside I; J picks the constant of 1 + t^2.
        let mut j_mask = i_mask;
        loop {
            let exponents: Vec<u8> = (0..l)
                .map(|line| {
                    if j_mask >> line & 1 == 1 {
                        0
                    } else if i_mask >> line & 1 == 1 {
                        2
                    } else {
                        1
                    }
                })
                .collect();
            monomials.push(Monomial {
                coeff: coeff.clone(),
                exponents,
                symbol: None,
                origin: Some(format!(
                    "{},{}",
                    set_label("I", &i_set),
                    set_label("J", &mask_indices(j_mask, l))
                )),
            });
            if j_mask == 0 {
                break;
            }
            j_mask = (j_mask - 1) & i_mask;
        }
    }
    PolynomialSum::new("HU", l, monomials, BTreeMap::new())
}
