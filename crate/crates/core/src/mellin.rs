//! The Mellin integrand data and its convergence domain.
//!
//! A representation allocates one Mellin variable per polynomial row: `x`
//! for each numerator (`U`/`HU`) monomial, `yR` for each real invariant
//! row, `yI` for each imaginary row. The region of contour real parts
//! where every Gamma factor converges is an open convex polytope: sign
//! constraints per variable, one balance equality tying the variable sum
//! to -D/2, and one linear form per line that must stay positive.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::CoreError;
use crate::graph::FeynmanGraph;
use crate::lp::{ClosureOpt, Feasibility, LinForm, LinearProgram, Rel};
use crate::poly::{
    hu_gw, hu_lsz, hv_imag_gw, hv_real_gw, symanzik_u, symanzik_v, PolynomialSum, RibbonData,
    RibbonModel,
};
use crate::rat::{int, ratio, Rat};

/// Whether line factors integrate over Schwinger parameters on (0, inf)
/// (commutative) or hyperbolic parameters on (0, 1) (vulcanized models).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmMode {
    Commutative,
    NonCommutative,
}

/// One Gamma-factor row of the representation: the monomial it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmRow {
    /// Base coefficient a_K raised to the row's Mellin variable.
    pub coeff: Rat,
    /// Exponent of each line variable in the monomial (the u or v column).
    pub exponents: Vec<u8>,
    /// Invariant carried by the row, if any; its numeric value may live in
    /// the symbol table of the enclosing representation.
    pub symbol: Option<String>,
}

impl CmRow {
    fn from_poly(p: &PolynomialSum) -> Vec<CmRow> {
        p.monomials()
            .iter()
            .map(|m| CmRow {
                coeff: m.coeff.clone(),
                exponents: m.exponents.clone(),
                symbol: m.symbol.clone(),
            })
            .collect()
    }
}

/// A complete Mellin representation: everything needed to write down the
/// integrand, place a contour, or scan its Gamma factors for poles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmRep {
    mode: CmMode,
    num_lines: usize,
    u_rows: Vec<CmRow>,
    v_real_rows: Vec<CmRow>,
    v_imag_rows: Vec<CmRow>,
    /// Squared masses per line; used by commutative mode only.
    masses: Vec<Rat>,
    /// Overall normalization constant multiplying the integral.
    prefactor: Rat,
    symbol_values: BTreeMap<String, Rat>,
}

impl CmRep {
    /// Assembles a representation from the polynomial data. The numerator
    /// polynomial must be nonempty (its variable sum sits inside a Gamma
    /// denominator) and all inputs must agree on the line count.
    pub fn build(
        mode: CmMode,
        hu: &PolynomialSum,
        hv_real: &PolynomialSum,
        hv_imag: &PolynomialSum,
        masses: Vec<Rat>,
        prefactor: Rat,
    ) -> Result<Self, CoreError> {
        let num_lines = hu.num_lines();
        if num_lines == 0 {
            return Err(CoreError::BadLineCount { lines: 0 });
        }
        if hu.is_empty() {
            return Err(CoreError::NoMonomials {
                name: String::from(hu.name()),
            });
        }
        for p in [hv_real, hv_imag] {
            if p.num_lines() != num_lines && !p.is_empty() {
                return Err(CoreError::LineCountMismatch {
                    name: String::from(p.name()),
                    expected: num_lines,
                    got: p.num_lines(),
                });
            }
        }
        if mode == CmMode::Commutative {
            if !hv_imag.is_empty() {
                return Err(CoreError::ModelMismatch {
                    expected: String::from("non-commutative (imaginary rows present)"),
                    got: String::from("commutative"),
                });
            }
            if masses.len() != num_lines {
                return Err(CoreError::LineCountMismatch {
                    name: String::from("masses"),
                    expected: num_lines,
                    got: masses.len(),
                });
            }
        } else if !masses.is_empty() {
            return Err(CoreError::LineCountMismatch {
                name: String::from("masses"),
                expected: 0,
                got: masses.len(),
            });
        }
        let mut symbol_values = hv_real.symbol_values().clone();
        symbol_values.extend(
            hv_imag
                .symbol_values()
                .iter()
                .map(|(k, v)| (k.clone(), v.clone())),
        );
        Ok(Self {
            mode,
            num_lines,
            u_rows: CmRow::from_poly(hu),
            v_real_rows: CmRow::from_poly(hv_real),
            v_imag_rows: CmRow::from_poly(hv_imag),
            masses,
            prefactor,
            symbol_values,
        })
    }

    /// Representation of an ordinary scalar graph from its Symanzik
    /// polynomials, with unit prefactor.
    pub fn commutative(g: &FeynmanGraph) -> Result<Self, CoreError> {
        let u = symanzik_u(g)?;
        let v = symanzik_v(g)?;
        let empty = PolynomialSum::new("HV_I", g.num_lines(), vec![], BTreeMap::new())?;
        Self::build(CmMode::Commutative, &u, &v, &empty, g.masses(), int(1))
    }

    /// Representation of a vulcanized matrix-model graph. GW inputs carry
    /// both parts of the second polynomial; LSZ inputs only the first.
    pub fn noncommutative(r: &RibbonData, externals: &[Rat]) -> Result<Self, CoreError> {
        let empty = PolynomialSum::new("HV", r.num_lines, vec![], BTreeMap::new())?;
        match r.model {
            RibbonModel::GrosseWulkenhaar => Self::build(
                CmMode::NonCommutative,
                &hu_gw(r)?,
                &hv_real_gw(r, externals)?,
                &hv_imag_gw(r, externals)?,
                vec![],
                int(1),
            ),
            RibbonModel::Lsz => Self::build(
                CmMode::NonCommutative,
                &hu_lsz(r)?,
                &empty,
                &empty,
                vec![],
                int(1),
            ),
        }
    }

    pub fn mode(&self) -> CmMode {
        self.mode
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    pub fn u_rows(&self) -> &[CmRow] {
        &self.u_rows
    }

    pub fn v_real_rows(&self) -> &[CmRow] {
        &self.v_real_rows
    }

    pub fn v_imag_rows(&self) -> &[CmRow] {
        &self.v_imag_rows
    }

    pub fn masses(&self) -> &[Rat] {
        &self.masses
    }

    pub fn prefactor(&self) -> &Rat {
        &self.prefactor
    }

    pub fn symbol_values(&self) -> &BTreeMap<String, Rat> {
        &self.symbol_values
    }

    /// Total number of Mellin variables, in the fixed order x.., yR.., yI..
    pub fn num_vars(&self) -> usize {
        self.u_rows.len() + self.v_real_rows.len() + self.v_imag_rows.len()
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.num_vars());
        for j in 0..self.u_rows.len() {
            names.push(format!("x{j}"));
        }
        for k in 0..self.v_real_rows.len() {
            names.push(format!("yR{k}"));
        }
        for k in 0..self.v_imag_rows.len() {
            names.push(format!("yI{k}"));
        }
        names
    }

    /// The homogeneous part of the line form: phi_l minus its constant 1.
    pub fn phi_form(&self, line: usize) -> LinForm {
        let mut form = LinForm::new();
        let mut var = 0usize;
        for rows in [&self.u_rows, &self.v_real_rows, &self.v_imag_rows] {
            for row in rows.iter() {
                let e = row.exponents[line];
                if e > 0 {
                    form.add(var, int(e as i64));
                }
                var += 1;
            }
        }
        form
    }

    /// Sum of all Mellin variables (the balance functional).
    pub fn balance_form(&self) -> LinForm {
        let mut form = LinForm::new();
        for v in 0..self.num_vars() {
            form.add(v, int(1));
        }
        form
    }

    fn var_ranges(&self) -> (usize, usize, usize) {
        (
            self.u_rows.len(),
            self.v_real_rows.len(),
            self.v_imag_rows.len(),
        )
    }
}

/// An exact interior point of the convergence region, with the uniform
/// margin by which it clears every strict constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MellinPoint {
    pub coords: Vec<Rat>,
    pub slack: Rat,
}

/// The convergence polytope of the contour real parts at a fixed dimension.
#[derive(Debug, Clone)]
pub struct MellinDomain {
    lp: LinearProgram,
    dim: Rat,
}

impl MellinDomain {
    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn dim(&self) -> &Rat {
        &self.dim
    }

    /// Max-margin interior point, if the open region is nonempty.
    pub fn witness(&self) -> Option<MellinPoint> {
        match self.lp.interior_point() {
            Feasibility::Witness { point, slack } => Some(MellinPoint {
                coords: point,
                slack,
            }),
            Feasibility::Infeasible => None,
        }
    }
}

/// Constraint system of the convergence region at dimension `d`:
/// x < 0 and yR < 0 and -1 < yI < 0, the balance equality
/// (sum of all variables) = -d/2, and Re phi_l > 0 per line.
pub fn build_domain(cm: &CmRep, d: &Rat) -> MellinDomain {
    let mut lp = LinearProgram::new(cm.var_names());
    let (nx, nyr, nyi) = cm.var_ranges();
    for v in 0..nx + nyr + nyi {
        let name = lp.names()[v].clone();
        lp.add_strict(LinForm::var(v), Rel::Less, int(0), name.as_str());
        if v >= nx + nyr {
            lp.add_strict(LinForm::var(v), Rel::Greater, int(-1), format!("{name}>-1"));
        }
    }
    for line in 0..cm.num_lines() {
        lp.add_strict(
            cm.phi_form(line),
            Rel::Greater,
            int(-1),
            format!("Re phi_{}", line + 1),
        );
    }
    lp.add_eq(cm.balance_form(), -d / int(2), "balance");
    MellinDomain {
        lp,
        dim: d.clone(),
    }
}

/// Interior point of the convergence region at dimension `d`, or None.
pub fn delta_witness(cm: &CmRep, d: &Rat) -> Option<MellinPoint> {
    build_domain(cm, d).witness()
}

/// Upper end of the dimensional analyticity interval (0, D_max).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StripBound {
    Finite(Rat),
    /// No constraint binds the balance: every positive dimension admits a
    /// contour.
    Unbounded,
}

/// Exact supremum of the dimensions admitting a contour, computed in one
/// LP solve with the dimension as an extra variable over the closed
/// relaxation of the region. Every dimension strictly inside (0, D_max) is
/// feasible: scaling a closure point inward restores strict inequalities.
pub fn analyticity_strip(cm: &CmRep) -> StripBound {
    let n = cm.num_vars();
    let d_var = n;
    let mut names = cm.var_names();
    names.push(String::from("D"));
    let mut lp = LinearProgram::new(names);
    let (nx, nyr, nyi) = cm.var_ranges();
    for v in 0..nx + nyr + nyi {
        let name = lp.names()[v].clone();
        lp.add_strict(LinForm::var(v), Rel::Less, int(0), name.as_str());
        if v >= nx + nyr {
            lp.add_strict(LinForm::var(v), Rel::Greater, int(-1), format!("{name}>-1"));
        }
    }
    for line in 0..cm.num_lines() {
        lp.add_strict(
            cm.phi_form(line),
            Rel::Greater,
            int(-1),
            format!("Re phi_{}", line + 1),
        );
    }
    // Balance with D as a variable: sum z + D/2 = 0.
    let balance = cm.balance_form().with(d_var, ratio(1, 2));
    lp.add_eq(balance, int(0), "balance");
    match lp.closure_supremum(&LinForm::var(d_var)) {
        ClosureOpt::Optimal { value, .. } => StripBound::Finite(value),
        ClosureOpt::Unbounded => StripBound::Unbounded,
        // The origin with D = 0 always satisfies the closed system.
        ClosureOpt::Infeasible => StripBound::Finite(Rat::zero()),
    }
}

/// Largest value of sum a_k * Re(y_k) over the closed convergence region
/// at dimension `d`, where `a` assigns a rational weight to invariant
/// symbols (absent symbols weigh zero). Under the rescaling of each
/// invariant s by lambda^a_s this bounds the leading power of lambda.
pub fn leading_power(
    cm: &CmRep,
    a: &BTreeMap<String, Rat>,
    d: &Rat,
) -> Result<Rat, CoreError> {
    let domain = build_domain(cm, d);
    let mut objective = LinForm::new();
    let mut var = cm.u_rows().len();
    for rows in [cm.v_real_rows(), cm.v_imag_rows()] {
        for row in rows {
            if let Some(weight) = row.symbol.as_ref().and_then(|s| a.get(s)) {
                if !weight.is_zero() {
                    objective.add(var, weight.clone());
                }
            }
            var += 1;
        }
    }
    match domain.lp.closure_supremum(&objective) {
        ClosureOpt::Optimal { value, .. } => Ok(value),
        ClosureOpt::Infeasible => Err(CoreError::EmptyDomainAt {
            dim: crate::rat::to_text(d),
        }),
        // All variables lie in [-d/2, 0] under the balance equality, so the
        // closed region is compact and optima always exist.
        ClosureOpt::Unbounded => unreachable!("bounded polytope"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{FeynmanGraph, InvariantSpec, LegSpec, LineSpec};
    use crate::linalg::AntisymMatrix;
    use crate::poly::Monomial;
    use num_traits::One;

    fn bubble() -> FeynmanGraph {
        FeynmanGraph::new(
            vec![String::from("a"), String::from("b")],
            vec![
                LineSpec {
                    id: 1,
                    ends: (String::from("a"), String::from("b")),
                    mass2: int(1),
                },
                LineSpec {
                    id: 2,
                    ends: (String::from("a"), String::from("b")),
                    mass2: int(1),
                },
            ],
            vec![
                LegSpec {
                    label: String::from("p1"),
                    vertex: String::from("a"),
                },
                LegSpec {
                    label: String::from("p2"),
                    vertex: String::from("b"),
                },
            ],
            vec![InvariantSpec {
                legs: vec![String::from("p1")],
                symbol: String::from("s"),
            }],
        )
        .unwrap()
    }

    fn antisym(dim: usize, upper: &[i64]) -> AntisymMatrix {
        let entries: Vec<Rat> = upper.iter().map(|&v| int(v)).collect();
        AntisymMatrix::from_upper(dim, &entries).unwrap()
    }

    fn gw_tadpole() -> RibbonData {
        RibbonData::new(
            RibbonModel::GrosseWulkenhaar,
            antisym(2, &[1]),
            vec![
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(0), int(0)],
                vec![int(0), int(0)],
            ],
            1,
            2,
            0,
            int(1),
            1,
        )
        .unwrap()
    }

    fn gw_tadpole_externals() -> Vec<Rat> {
        vec![int(1), int(1), int(0), int(0)]
    }

    fn gw_vacuum_tadpole() -> RibbonData {
        RibbonData::new(
            RibbonModel::GrosseWulkenhaar,
            antisym(2, &[1]),
            vec![],
            1,
            2,
            0,
            int(1),
            1,
        )
        .unwrap()
    }

    fn gw_double_tadpole(upper: &[i64], faces: i64, genus: i64) -> RibbonData {
        RibbonData::new(
            RibbonModel::GrosseWulkenhaar,
            antisym(4, upper),
            vec![],
            2,
            faces,
            genus,
            int(1),
            1,
        )
        .unwrap()
    }

    #[test]
    fn bubble_rep_shape() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        assert_eq!(cm.mode(), CmMode::Commutative);
        assert_eq!(cm.u_rows().len(), 2);
        assert_eq!(cm.v_real_rows().len(), 1);
        assert!(cm.v_imag_rows().is_empty());
        assert_eq!(cm.num_vars(), 3);
        assert_eq!(cm.masses(), &[int(1), int(1)]);
        assert_eq!(cm.var_names(), vec!["x0", "x1", "yR0"]);
        assert_eq!(cm.v_real_rows()[0].symbol.as_deref(), Some("s"));
        for row in cm.u_rows() {
            assert!(row.coeff.is_one());
        }
    }

    #[test]
    fn bubble_domain_matches_hand_transcription() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let dom = build_domain(&cm, &int(1));
        // Three sign constraints plus two line forms; one equality.
        assert_eq!(dom.lp().strict().len(), 5);
        assert_eq!(dom.lp().equalities().len(), 1);
        let eq = &dom.lp().equalities()[0];
        assert_eq!(eq.bound, ratio(-1, 2));
        // phi_1 = x1 + yR0 + 1 and phi_2 = x0 + yR0 + 1: u rows are sorted
        // with the (0,1) exponent vector first.
        let phi1 = cm.phi_form(0);
        assert_eq!(phi1.eval(&[int(9), int(1), int(7)]), int(8));
        let phi2 = cm.phi_form(1);
        assert_eq!(phi2.eval(&[int(9), int(1), int(7)]), int(16));
        // Exact substitution at the frozen witness: every sign slack is 1/6,
        // the line forms clear their bound by 2/3.
        let w = vec![ratio(-1, 6), ratio(-1, 6), ratio(-1, 6)];
        assert!(dom.lp().holds_strictly(&w));
    }

    #[test]
    fn bubble_witness_frozen() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let w = delta_witness(&cm, &int(1)).unwrap();
        assert_eq!(w.coords, vec![ratio(-1, 6), ratio(-1, 6), ratio(-1, 6)]);
        assert_eq!(w.slack, ratio(1, 6));
    }

    #[test]
    fn bubble_infeasible_at_four() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        assert!(delta_witness(&cm, &int(4)).is_none());
        // Just below four a contour still exists.
        assert!(delta_witness(&cm, &ratio(39, 10)).is_some());
    }

    #[test]
    fn bubble_strip_ends_at_four() {
        // The two line forms plus the balance pinch exactly at D = 4, the
        // dimension where the one-loop numerator Gamma(2 - D/2) first
        // diverges.
        let cm = CmRep::commutative(&bubble()).unwrap();
        assert_eq!(analyticity_strip(&cm), StripBound::Finite(int(4)));
    }

    #[test]
    fn gw_strips() {
        // With externals the constant invariant row leaves the balance
        // unconstrained from below.
        let with_legs = CmRep::noncommutative(&gw_tadpole(), &gw_tadpole_externals()).unwrap();
        assert_eq!(analyticity_strip(&with_legs), StripBound::Unbounded);
        // The vacuum variant has the single row HU = 2t: phi = x0 + 1 > 0
        // caps D = -2 x0 at 2.
        let vacuum = CmRep::noncommutative(&gw_vacuum_tadpole(), &[]).unwrap();
        assert_eq!(analyticity_strip(&vacuum), StripBound::Finite(int(2)));
        // Planar double tadpole: the constant HU monomial unbinds the sum.
        let planar =
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 0, 0, 1, 1], 3, 0), &[]).unwrap();
        assert_eq!(analyticity_strip(&planar), StripBound::Unbounded);
        // Nonplanar double tadpole: rows t1^2, t1 t2, t2^2 cap at exactly 2.
        let nonplanar =
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 1, 1, 1, 0], 1, 1), &[]).unwrap();
        assert_eq!(analyticity_strip(&nonplanar), StripBound::Finite(int(2)));
    }

    #[test]
    fn gw_feasible_below_two() {
        // Vulcanized inputs admit a contour everywhere in (0, 2).
        let cm = CmRep::noncommutative(&gw_tadpole(), &gw_tadpole_externals()).unwrap();
        for d in [ratio(1, 2), int(1), ratio(3, 2), ratio(19, 10)] {
            let dom = build_domain(&cm, &d);
            let w = dom.witness().unwrap_or_else(|| panic!("infeasible at {d}"));
            assert!(dom.lp().holds_strictly(&w.coords));
            assert!(w.slack > Rat::zero());
        }
    }

    #[test]
    fn single_numerator_row_is_well_formed() {
        let cm = CmRep::noncommutative(&gw_vacuum_tadpole(), &[]).unwrap();
        assert_eq!(cm.num_vars(), 1);
        let w = delta_witness(&cm, &int(1)).unwrap();
        // The balance pins x0 = -1/2; the margin is capped by the sign and
        // line constraints symmetrically.
        assert_eq!(w.coords, vec![ratio(-1, 2)]);
        assert_eq!(w.slack, ratio(1, 2));
    }

    #[test]
    fn imaginary_rows_get_two_sided_bounds() {
        let cm = CmRep::noncommutative(&gw_tadpole(), &gw_tadpole_externals()).unwrap();
        assert_eq!(cm.v_imag_rows().len(), 1);
        let dom = build_domain(&cm, &int(1));
        // One extra strict constraint relative to the one-sided variables.
        let lowers = dom
            .lp()
            .strict()
            .iter()
            .filter(|c| c.rel == Rel::Greater && c.label.contains("yI"))
            .count();
        assert_eq!(lowers, 1);
        // A point with yI at -1 exactly is outside.
        let mut coords = delta_witness(&cm, &int(1)).unwrap().coords;
        let yi = coords.len() - 1;
        coords[yi] = int(-1);
        assert!(!dom.lp().holds_strictly(&coords));
    }

    #[test]
    fn empty_imag_part_reduces_to_commutative_shape() {
        let vacuum = CmRep::noncommutative(&gw_vacuum_tadpole(), &[]).unwrap();
        let dom = build_domain(&vacuum, &int(1));
        // No two-sided bounds anywhere: one sign constraint per variable
        // plus one line form.
        assert_eq!(dom.lp().strict().len(), vacuum.num_vars() + 1);
    }

    #[test]
    fn scaling_keeps_witnesses_feasible() {
        let bubble_cm = CmRep::commutative(&bubble()).unwrap();
        let w = delta_witness(&bubble_cm, &int(3)).unwrap();
        for d_new in [ratio(1, 2), int(1), int(2), ratio(5, 2)] {
            let c = &d_new / int(3);
            let scaled: Vec<Rat> = w.coords.iter().map(|z| z * &c).collect();
            assert!(
                build_domain(&bubble_cm, &d_new).lp().holds_strictly(&scaled),
                "bubble at {d_new}"
            );
        }
        let nc = CmRep::noncommutative(&gw_tadpole(), &gw_tadpole_externals()).unwrap();
        let w = delta_witness(&nc, &ratio(19, 10)).unwrap();
        for d_new in [int(1), ratio(1, 2)] {
            let c = &d_new / ratio(19, 10);
            let scaled: Vec<Rat> = w.coords.iter().map(|z| z * &c).collect();
            assert!(
                build_domain(&nc, &d_new).lp().holds_strictly(&scaled),
                "tadpole at {d_new}"
            );
        }
    }

    #[test]
    fn midpoints_stay_inside() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let dom = build_domain(&cm, &int(1));
        let a = delta_witness(&cm, &int(1)).unwrap().coords;
        let b = vec![ratio(-1, 8), ratio(-1, 8), ratio(-1, 4)];
        assert!(dom.lp().holds_strictly(&b));
        let mid: Vec<Rat> = a
            .iter()
            .zip(&b)
            .map(|(p, q)| (p + q) / int(2))
            .collect();
        assert!(dom.lp().holds_strictly(&mid));
    }

    #[test]
    fn leading_power_bubble() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let mut a = BTreeMap::new();
        assert_eq!(leading_power(&cm, &a, &int(1)).unwrap(), int(0));
        a.insert(String::from("s"), int(1));
        // tau < 0 with supremum 0 on the closure.
        assert_eq!(leading_power(&cm, &a, &int(1)).unwrap(), int(0));
        // Reversing the scaling direction pushes tau to its other extreme,
        // tau = -1/2 with both sigma at zero.
        a.insert(String::from("s"), int(-1));
        assert_eq!(leading_power(&cm, &a, &int(1)).unwrap(), ratio(1, 2));
        // Far outside the strip even the closure is empty.
        assert!(matches!(
            leading_power(&cm, &a, &int(5)),
            Err(CoreError::EmptyDomainAt { .. })
        ));
    }

    #[test]
    fn constant_numerator_row_unbinds_the_strip() {
        let hu = PolynomialSum::new(
            "HU",
            1,
            vec![
                Monomial {
                    coeff: int(1),
                    exponents: vec![0],
                    symbol: None,
                    origin: None,
                },
                Monomial {
                    coeff: int(1),
                    exponents: vec![1],
                    symbol: None,
                    origin: None,
                },
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let empty = PolynomialSum::new("HV", 1, vec![], BTreeMap::new()).unwrap();
        let cm = CmRep::build(
            CmMode::NonCommutative,
            &hu,
            &empty,
            &empty,
            vec![],
            int(1),
        )
        .unwrap();
        assert_eq!(analyticity_strip(&cm), StripBound::Unbounded);
    }

    #[test]
    fn build_rejects_bad_inputs() {
        let empty1 = PolynomialSum::new("HU", 1, vec![], BTreeMap::new()).unwrap();
        let empty_v = PolynomialSum::new("HV", 1, vec![], BTreeMap::new()).unwrap();
        assert!(matches!(
            CmRep::build(
                CmMode::NonCommutative,
                &empty1,
                &empty_v,
                &empty_v,
                vec![],
                int(1)
            ),
            Err(CoreError::NoMonomials { .. })
        ));
        let one_row = PolynomialSum::new(
            "HU",
            1,
            vec![Monomial {
                coeff: int(1),
                exponents: vec![1],
                symbol: None,
                origin: None,
            }],
            BTreeMap::new(),
        )
        .unwrap();
        let imag_row = PolynomialSum::new(
            "HV_I",
            1,
            vec![Monomial {
                coeff: int(1),
                exponents: vec![1],
                symbol: Some(String::from("sI[]")),
                origin: None,
            }],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(matches!(
            CmRep::build(
                CmMode::Commutative,
                &one_row,
                &empty_v,
                &imag_row,
                vec![int(1)],
                int(1)
            ),
            Err(CoreError::ModelMismatch { .. })
        ));
        assert!(matches!(
            CmRep::build(
                CmMode::Commutative,
                &one_row,
                &empty_v,
                &empty_v,
                vec![],
                int(1)
            ),
            Err(CoreError::LineCountMismatch { .. })
        ));
        let mismatched = PolynomialSum::new(
            "HV_R",
            2,
            vec![Monomial {
                coeff: int(1),
                exponents: vec![1, 0],
                symbol: Some(String::from("s")),
                origin: None,
            }],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(matches!(
            CmRep::build(
                CmMode::Commutative,
                &one_row,
                &mismatched,
                &empty_v,
                vec![int(1)],
                int(1)
            ),
            Err(CoreError::LineCountMismatch { .. })
        ));
    }

    #[test]
    fn gw_even_parity_has_no_representation() {
        let r = RibbonData::new(
            RibbonModel::GrosseWulkenhaar,
            antisym(2, &[1]),
            vec![],
            1,
            2,
            0,
            int(1),
            0,
        )
        .unwrap();
        assert!(matches!(
            CmRep::noncommutative(&r, &[]),
            Err(CoreError::NoMonomials { .. })
        ));
    }
}
