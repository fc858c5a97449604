//! Candidate locations of dimensional singularities.
//!
//! Continuing an amplitude in the dimension slides the balance hyperplane
//! through the convergence polytope; a singularity can only arise where
//! the contour gets pinned between polar varieties of the Gamma factors.
//! The scan works on the relaxed closures: each factor may retreat past
//! its first poles (a variable cap `z <= n`, or a weakened line bound
//! `phi >= -n`, doubled stride when the factor carries half its argument),
//! and the infimum of the variable sum over a relaxed closure marks the
//! dimension `D = -2 inf` at which that retreat is exhausted. Sweeping
//! every retreat assignment up to the cutoff enumerates the pinch values;
//! the list is a superset of the true poles, since a pinned contour may
//! still be rescued by residue cancellations.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::lp::{ClosureOpt, LinForm, LinearProgram, Rel};
use crate::mellin::{CmMode, CmRep};
use crate::rat::{int, Rat};

/// Why a dimension value is on the candidate list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoleOrigin {
    /// The relaxed convergence closure pinches: `conditions` are the
    /// constraints tight at a minimizer `point` of the variable sum.
    Pinch {
        conditions: Vec<String>,
        point: Vec<Rat>,
    },
    /// Explicit dimension-dependent Gamma factor of the vulcanized
    /// integrand, singular at D = -2n regardless of the contour.
    DimensionGamma { n: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleCandidate {
    pub dim: Rat,
    pub origin: PoleOrigin,
}

/// Sorted, deduplicated candidates inside the requested window, each with
/// the first certificate found for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleScanResult {
    pub candidates: Vec<PoleCandidate>,
    pub n_cutoff: u32,
    pub window: (Rat, Rat),
}

impl PoleScanResult {
    pub fn dims(&self) -> Vec<Rat> {
        self.candidates.iter().map(|c| c.dim.clone()).collect()
    }
}

/// True when the variable sum is bounded below on the relaxed closures:
/// every one-sided variable must feel at least one line form. A row with
/// an all-zero exponent vector leaves its variable free to run to minus
/// infinity, so no pinch can occur at any retreat depth.
fn bounded_below(cm: &CmRep) -> bool {
    cm.u_rows()
        .iter()
        .chain(cm.v_real_rows())
        .all(|row| row.exponents.iter().any(|&e| e > 0))
}

fn window_accepts(window: (&Rat, &Rat), d: &Rat) -> bool {
    d >= window.0 && d <= window.1
}

fn tight_conditions(
    names: &[String],
    phi: &[LinForm],
    offsets: &[u32],
    step: i64,
    yi_start: usize,
    point: &[Rat],
) -> Vec<String> {
    let num_vars = names.len();
    let mut out = Vec::new();
    for v in 0..num_vars {
        if point[v] == int(i64::from(offsets[v])) {
            out.push(format!("{} = {}", names[v], offsets[v]));
        }
    }
    for v in yi_start..num_vars {
        if point[v] == int(-1) {
            out.push(format!("{} = -1", names[v]));
        }
    }
    for (l, form) in phi.iter().enumerate() {
        let pole = -(step * i64::from(offsets[num_vars + l]));
        if form.eval(point) == int(pole - 1) {
            out.push(format!("phi_{} = {}", l + 1, pole));
        }
    }
    out
}

/// Enumerates candidate singular dimensions inside the closed `window`.
/// Exhaustive over retreat assignments, so the cost is
/// `(n_cutoff + 1)^(variables + lines)` small exact LP solves; enlarging
/// the cutoff never removes a candidate.
pub fn scan_poles(cm: &CmRep, n_cutoff: u32, window: (Rat, Rat)) -> PoleScanResult {
    let bounds = (&window.0, &window.1);
    let mut found: BTreeMap<Rat, PoleOrigin> = BTreeMap::new();
    if cm.mode() == CmMode::NonCommutative {
        for n in 0..=n_cutoff {
            let d = int(-2 * i64::from(n));
            if window_accepts(bounds, &d) {
                found.entry(d).or_insert(PoleOrigin::DimensionGamma { n });
            }
        }
    }
    if bounded_below(cm) {
        let num_vars = cm.num_vars();
        let num_lines = cm.num_lines();
        let yi_start = num_vars - cm.v_imag_rows().len();
        let step: i64 = match cm.mode() {
            CmMode::Commutative => 1,
            CmMode::NonCommutative => 2,
        };
        let names = cm.var_names();
        let phi: Vec<LinForm> = (0..num_lines).map(|l| cm.phi_form(l)).collect();
        let balance = cm.balance_form();
        let digits = num_vars + num_lines;
        let mut offsets = vec![0u32; digits];
        'grid: loop {
            let mut lp = LinearProgram::new(names.clone());
            for v in 0..num_vars {
                lp.add_strict(
                    LinForm::var(v),
                    Rel::Less,
                    int(i64::from(offsets[v])),
                    names[v].as_str(),
                );
                if v >= yi_start {
                    lp.add_strict(
                        LinForm::var(v),
                        Rel::Greater,
                        int(-1),
                        format!("{} floor", names[v]),
                    );
                }
            }
            for (l, form) in phi.iter().enumerate() {
                let bound = int(-1 - step * i64::from(offsets[num_vars + l]));
                lp.add_strict(form.clone(), Rel::Greater, bound, format!("phi_{}", l + 1));
            }
            match lp.closure_infimum(&balance) {
                ClosureOpt::Optimal { value, point } => {
                    let d = int(-2) * value;
                    if window_accepts(bounds, &d) && !found.contains_key(&d) {
                        let conditions =
                            tight_conditions(&names, &phi, &offsets, step, yi_start, &point);
                        found.insert(d, PoleOrigin::Pinch { conditions, point });
                    }
                }
                // The origin satisfies every relaxed closure, and
                // bounded_below rules out recession directions.
                _ => unreachable!("relaxed closure is nonempty and bounded"),
            }
            let mut i = digits;
            loop {
                if i == 0 {
                    break 'grid;
                }
                i -= 1;
                if offsets[i] < n_cutoff {
                    offsets[i] += 1;
                    continue 'grid;
                }
                offsets[i] = 0;
            }
        }
    }
    let candidates = found
        .into_iter()
        .map(|(dim, origin)| PoleCandidate { dim, origin })
        .collect();
    PoleScanResult {
        candidates,
        n_cutoff,
        window,
    }
}

/// True when the scan finds nothing strictly inside the interval (0, 2),
/// the common analyticity strip of the quartic models.
pub fn strip_is_clear(cm: &CmRep, n_cutoff: u32) -> bool {
    let scan = scan_poles(cm, n_cutoff, (int(0), int(2)));
    !scan
        .candidates
        .iter()
        .any(|c| c.dim > int(0) && c.dim < int(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{FeynmanGraph, InvariantSpec, LegSpec, LineSpec};
    use crate::linalg::AntisymMatrix;
    use crate::mellin::{analyticity_strip, StripBound};
    use crate::poly::{Monomial, PolynomialSum, RibbonData, RibbonModel};
    use crate::rat::ratio;

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

    fn lsz_line() -> RibbonData {
        RibbonData::new(
            RibbonModel::Lsz,
            antisym(3, &[0, 0, 1]),
            vec![],
            1,
            2,
            0,
            int(2),
            0,
        )
        .unwrap()
    }

    fn synthetic_comm(rows: &[&[u8]], masses: usize) -> CmRep {
        let monomials = rows
            .iter()
            .map(|exps| Monomial {
                coeff: int(1),
                exponents: exps.to_vec(),
                symbol: None,
                origin: None,
            })
            .collect();
        let num_lines = rows[0].len();
        let hu = PolynomialSum::new("HU", num_lines, monomials, BTreeMap::new()).unwrap();
        let empty = PolynomialSum::new("HV", num_lines, vec![], BTreeMap::new()).unwrap();
        CmRep::build(
            CmMode::Commutative,
            &hu,
            &empty,
            &empty,
            vec![int(1); masses],
            int(1),
        )
        .unwrap()
    }

    #[test]
    fn bubble_window_isolates_four() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let scan = scan_poles(&cm, 2, (int(3), int(5)));
        assert_eq!(scan.dims(), vec![int(4)]);
        match &scan.candidates[0].origin {
            PoleOrigin::Pinch { conditions, point } => {
                assert_eq!(conditions, &["yR0 = 0", "phi_1 = 0", "phi_2 = 0"]);
                assert_eq!(point, &vec![int(-1), int(-1), int(0)]);
            }
            other => panic!("expected a pinch, got {other:?}"),
        }
    }

    #[test]
    fn bubble_ladder_is_even_from_four() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let scan = scan_poles(&cm, 2, (int(-20), int(20)));
        let expect: Vec<Rat> = (0..=6).map(|k| int(4 + 2 * k)).collect();
        assert_eq!(scan.dims(), expect);
        // Six needs one retreat: the first assignment reaching it weakens
        // the second line bound.
        let six = scan.candidates.iter().find(|c| c.dim == int(6)).unwrap();
        match &six.origin {
            PoleOrigin::Pinch { conditions, point } => {
                assert_eq!(conditions, &["yR0 = 0", "phi_1 = 0", "phi_2 = -1"]);
                assert_eq!(point, &vec![int(-2), int(-1), int(0)]);
            }
            other => panic!("expected a pinch, got {other:?}"),
        }
    }

    #[test]
    fn window_filters_inclusively() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        assert_eq!(
            scan_poles(&cm, 2, (int(5), int(9))).dims(),
            vec![int(6), int(8)]
        );
        assert_eq!(scan_poles(&cm, 2, (int(4), int(4))).dims(), vec![int(4)]);
        assert!(scan_poles(&cm, 2, (int(0), int(2))).dims().is_empty());
    }

    #[test]
    fn growing_the_cutoff_only_adds() {
        let wide = (int(-30), int(30));
        let bubble_cm = CmRep::commutative(&bubble()).unwrap();
        let nonplanar =
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 1, 1, 1, 0], 1, 1), &[]).unwrap();
        for cm in [&bubble_cm, &nonplanar] {
            let mut previous: Vec<Rat> = Vec::new();
            for cutoff in 0..=2 {
                let dims = scan_poles(cm, cutoff, wide.clone()).dims();
                assert!(previous.iter().all(|d| dims.contains(d)));
                previous = dims;
            }
        }
    }

    #[test]
    fn nonplanar_vacuum_ladder() {
        let cm =
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 1, 1, 1, 0], 1, 1), &[]).unwrap();
        let scan = scan_poles(&cm, 2, (int(-10), int(12)));
        let expect: Vec<Rat> = [-4, -2, 0, 2, 4, 6, 8, 10].iter().map(|&d| int(d)).collect();
        assert_eq!(scan.dims(), expect);
        // Nonpositive entries come from the explicit Gamma(D/2) factors,
        // positive ones from contour pinches.
        for c in &scan.candidates {
            if c.dim <= int(0) {
                assert!(matches!(c.origin, PoleOrigin::DimensionGamma { .. }), "{:?}", c);
            } else {
                assert!(matches!(c.origin, PoleOrigin::Pinch { .. }), "{:?}", c);
            }
        }
    }

    #[test]
    fn unbounded_reps_keep_only_dimension_gammas() {
        let with_legs = CmRep::noncommutative(
            &gw_tadpole(),
            &[int(1), int(1), int(0), int(0)],
        )
        .unwrap();
        let planar =
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 0, 0, 1, 1], 3, 0), &[]).unwrap();
        let lsz = CmRep::noncommutative(&lsz_line(), &[]).unwrap();
        for cm in [&with_legs, &planar, &lsz] {
            let scan = scan_poles(cm, 2, (int(-10), int(10)));
            assert_eq!(scan.dims(), vec![int(-4), int(-2), int(0)]);
            assert!(scan
                .candidates
                .iter()
                .all(|c| matches!(c.origin, PoleOrigin::DimensionGamma { .. })));
        }
    }

    #[test]
    fn commutative_mode_has_no_dimension_gammas() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let scan = scan_poles(&cm, 2, (int(-10), int(10)));
        assert_eq!(scan.dims(), vec![int(4), int(6), int(8), int(10)]);
    }

    #[test]
    fn strip_clear_across_the_quartic_fixtures() {
        let fixtures = [
            CmRep::noncommutative(&gw_vacuum_tadpole(), &[]).unwrap(),
            CmRep::noncommutative(&gw_tadpole(), &[int(1), int(1), int(0), int(0)]).unwrap(),
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 0, 0, 1, 1], 3, 0), &[]).unwrap(),
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 1, 1, 1, 0], 1, 1), &[]).unwrap(),
            CmRep::noncommutative(&lsz_line(), &[]).unwrap(),
            CmRep::commutative(&bubble()).unwrap(),
        ];
        for cm in &fixtures {
            assert!(strip_is_clear(cm, 2));
        }
    }

    #[test]
    fn squared_line_variable_lands_inside_the_strip() {
        // One line appearing squared in the single numerator row pins the
        // contour at half-integer depth: candidates 1 + n.
        let cm = synthetic_comm(&[&[2]], 1);
        let scan = scan_poles(&cm, 2, (int(0), int(4)));
        assert_eq!(scan.dims(), vec![int(1), int(2), int(3)]);
        match &scan.candidates[0].origin {
            PoleOrigin::Pinch { conditions, point } => {
                assert_eq!(conditions, &["phi_1 = 0"]);
                assert_eq!(point, &vec![ratio(-1, 2)]);
            }
            other => panic!("expected a pinch, got {other:?}"),
        }
        assert!(!strip_is_clear(&cm, 2));
    }

    #[test]
    fn imaginary_floor_can_carry_a_pinch() {
        let hu = PolynomialSum::new(
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
        let empty = PolynomialSum::new("HV_R", 1, vec![], BTreeMap::new()).unwrap();
        let imag = PolynomialSum::new(
            "HV_I",
            1,
            vec![Monomial {
                coeff: int(1),
                exponents: vec![0],
                symbol: Some(String::from("sI[]")),
                origin: None,
            }],
            BTreeMap::new(),
        )
        .unwrap();
        let cm = CmRep::build(CmMode::NonCommutative, &hu, &empty, &imag, vec![], int(1)).unwrap();
        let scan = scan_poles(&cm, 2, (int(1), int(20)));
        assert_eq!(scan.dims(), vec![int(4), int(8), int(12)]);
        match &scan.candidates[0].origin {
            PoleOrigin::Pinch { conditions, point } => {
                assert_eq!(conditions, &["yI0 = -1", "phi_1 = 0"]);
                assert_eq!(point, &vec![int(-1), int(-1)]);
            }
            other => panic!("expected a pinch, got {other:?}"),
        }
    }

    #[test]
    fn line_relabeling_preserves_candidates() {
        let a = synthetic_comm(&[&[2, 0], &[0, 1]], 2);
        let b = synthetic_comm(&[&[0, 2], &[1, 0]], 2);
        let wide = (int(-30), int(30));
        assert_eq!(
            scan_poles(&a, 2, wide.clone()).dims(),
            scan_poles(&b, 2, wide).dims()
        );
    }

    #[test]
    fn monomial_input_order_is_canonicalized() {
        let forward = synthetic_comm(&[&[2, 0], &[0, 1]], 2);
        let reversed = synthetic_comm(&[&[0, 1], &[2, 0]], 2);
        assert_eq!(forward, reversed);
    }

    #[test]
    fn strip_edge_is_the_first_pinch() {
        let cases = [
            CmRep::commutative(&bubble()).unwrap(),
            CmRep::noncommutative(&gw_vacuum_tadpole(), &[]).unwrap(),
            CmRep::noncommutative(&gw_double_tadpole(&[0, 1, 1, 1, 1, 0], 1, 1), &[]).unwrap(),
        ];
        for cm in &cases {
            let edge = match analyticity_strip(cm) {
                StripBound::Finite(d) => d,
                StripBound::Unbounded => panic!("expected a finite strip"),
            };
            let scan = scan_poles(cm, 1, (int(0), int(40)));
            let first_pinch = scan
                .candidates
                .iter()
                .find(|c| matches!(c.origin, PoleOrigin::Pinch { .. }))
                .unwrap();
            assert_eq!(first_pinch.dim, edge);
        }
    }

    #[test]
    fn tree_graph_has_no_candidates() {
        let g = FeynmanGraph::new(
            vec![String::from("a"), String::from("b")],
            vec![LineSpec {
                id: 1,
                ends: (String::from("a"), String::from("b")),
                mass2: int(1),
            }],
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
        .unwrap();
        let cm = CmRep::commutative(&g).unwrap();
        assert!(scan_poles(&cm, 2, (int(-30), int(30))).dims().is_empty());
        assert_eq!(analyticity_strip(&cm), StripBound::Unbounded);
    }

    #[test]
    fn result_records_its_parameters() {
        let cm = CmRep::commutative(&bubble()).unwrap();
        let scan = scan_poles(&cm, 1, (int(3), int(5)));
        assert_eq!(scan.n_cutoff, 1);
        assert_eq!(scan.window, (int(3), int(5)));
    }
}
