//! Exact rational linear programming.
//!
//! The solver is a dense two-phase simplex over arbitrary-precision
//! rationals with Bland's anti-cycling rule, so every verdict here is exact
//! and deterministic; no floating point is involved at any stage.
//!
//! Strict feasibility is decided by maximizing a uniform slack variable `t`
//! added to every strict inequality (capped at 1 so the problem is always
//! bounded): the system has an interior point iff the optimal slack is
//! positive, and the optimizer doubles as a well-centered witness.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

/// Sparse linear form `sum coeff_v * var_v` over the program's variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinForm {
    terms: BTreeMap<usize, Rat>,
}

impl LinForm {
    pub fn new() -> Self {
        Self::default()
    }

    /// Single-variable form `var`.
    pub fn var(v: usize) -> Self {
        let mut f = Self::new();
        f.add(v, Rat::one());
        f
    }

    /// Adds `coeff * var_v`, merging with any existing term.
    pub fn add(&mut self, v: usize, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(v).or_insert_with(Rat::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn with(mut self, v: usize, coeff: Rat) -> Self {
        self.add(v, coeff);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.terms.iter().map(|(&v, c)| (v, c))
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (&v, c) in &self.terms {
            acc += c * &point[v];
        }
        acc
    }

    fn dense(&self, n: usize) -> Vec<Rat> {
        let mut row = vec![Rat::zero(); n];
        for (&v, c) in &self.terms {
            row[v] = c.clone();
        }
        row
    }
}

/// Direction of a strict inequality `form REL bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Less,
    Greater,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictIneq {
    pub form: LinForm,
    pub rel: Rel,
    pub bound: Rat,
    /// Human-readable label, carried through to witnesses and reports.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equality {
    pub form: LinForm,
    pub bound: Rat,
    pub label: String,
}

/// A system of strict inequalities and equalities over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    names: Vec<String>,
    strict: Vec<StrictIneq>,
    eqs: Vec<Equality>,
}

/// Outcome of the strict-interior search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A point satisfying every strict inequality with uniform margin
    /// `slack` (and every equality exactly).
    Witness { point: Vec<Rat>, slack: Rat },
    Infeasible,
}

/// Outcome of optimizing a linear functional over the closed relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureOpt {
    Optimal { value: Rat, point: Vec<Rat> },
    Unbounded,
    Infeasible,
}

impl LinearProgram {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            strict: Vec::new(),
            eqs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn strict(&self) -> &[StrictIneq] {
        &self.strict
    }

    pub fn equalities(&self) -> &[Equality] {
        &self.eqs
    }

    pub fn add_strict(&mut self, form: LinForm, rel: Rel, bound: Rat, label: impl Into<String>) {
        self.strict.push(StrictIneq {
            form,
            rel,
            bound,
            label: label.into(),
        });
    }

    pub fn add_eq(&mut self, form: LinForm, bound: Rat, label: impl Into<String>) {
        self.eqs.push(Equality {
            form,
            bound,
            label: label.into(),
        });
    }

    /// True if `point` satisfies every strict inequality strictly and every
    /// equality exactly.
    pub fn holds_strictly(&self, point: &[Rat]) -> bool {
        self.eqs.iter().all(|e| e.form.eval(point) == e.bound)
            && self.strict.iter().all(|s| {
                let v = s.form.eval(point);
                match s.rel {
                    Rel::Less => v < s.bound,
                    Rel::Greater => v > s.bound,
                }
            })
    }

    /// Maximizes a uniform slack over all strict inequalities (capped at 1).
    /// Positive optimal slack yields a witness; otherwise the strict system
    /// has no interior point.
    pub fn interior_point(&self) -> Feasibility {
        let n = self.num_vars();
        let t = n; // extra slack variable
        let mut cons: Vec<Constraint> = Vec::new();
        for s in &self.strict {
            let mut coeffs = s.form.dense(n + 1);
            match s.rel {
                Rel::Less => {
                    coeffs[t] = Rat::one();
                    cons.push(Constraint {
                        coeffs,
                        op: Op::Le,
                        rhs: s.bound.clone(),
                    });
                }
                Rel::Greater => {
                    coeffs[t] = -Rat::one();
                    cons.push(Constraint {
                        coeffs,
                        op: Op::Ge,
                        rhs: s.bound.clone(),
                    });
                }
            }
        }
        for e in &self.eqs {
            cons.push(Constraint {
                coeffs: e.form.dense(n + 1),
                op: Op::Eq,
                rhs: e.bound.clone(),
            });
        }
        // Cap the slack so the auxiliary objective is always bounded.
        let mut cap = vec![Rat::zero(); n + 1];
        cap[t] = Rat::one();
        cons.push(Constraint {
            coeffs: cap,
            op: Op::Le,
            rhs: Rat::one(),
        });
        let mut objective = vec![Rat::zero(); n + 1];
        objective[t] = Rat::one();
        match simplex_maximize(n + 1, &cons, &objective) {
            SimplexResult::Optimal { value, mut point } => {
                if value.is_positive() {
                    point.truncate(n);
                    debug_assert!(self.holds_strictly(&point));
                    Feasibility::Witness {
                        point,
                        slack: value,
                    }
                } else {
                    Feasibility::Infeasible
                }
            }
            SimplexResult::Infeasible => Feasibility::Infeasible,
            // The slack cap makes the auxiliary problem bounded.
            SimplexResult::Unbounded => unreachable!("slack objective is capped"),
        }
    }

    /// Maximizes `objective` over the closed relaxation (strict inequalities
    /// weakened to non-strict ones).
    pub fn closure_supremum(&self, objective: &LinForm) -> ClosureOpt {
        self.closure_opt(objective, false)
    }

    /// Minimizes `objective` over the closed relaxation.
    pub fn closure_infimum(&self, objective: &LinForm) -> ClosureOpt {
        self.closure_opt(objective, true)
    }

    fn closure_opt(&self, objective: &LinForm, minimize: bool) -> ClosureOpt {
        let n = self.num_vars();
        let mut cons: Vec<Constraint> = Vec::new();
        for s in &self.strict {
            cons.push(Constraint {
                coeffs: s.form.dense(n),
                op: match s.rel {
                    Rel::Less => Op::Le,
                    Rel::Greater => Op::Ge,
                },
                rhs: s.bound.clone(),
            });
        }
        for e in &self.eqs {
            cons.push(Constraint {
                coeffs: e.form.dense(n),
                op: Op::Eq,
                rhs: e.bound.clone(),
            });
        }
        let mut obj = objective.dense(n);
        if minimize {
            for c in &mut obj {
                *c = -c.clone();
            }
        }
        match simplex_maximize(n, &cons, &obj) {
            SimplexResult::Optimal { value, point } => ClosureOpt::Optimal {
                value: if minimize { -value } else { value },
                point,
            },
            SimplexResult::Infeasible => ClosureOpt::Infeasible,
            SimplexResult::Unbounded => ClosureOpt::Unbounded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Le,
    Ge,
    Eq,
}

struct Constraint {
    coeffs: Vec<Rat>,
    op: Op,
    rhs: Rat,
}

enum SimplexResult {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

/// Maximizes `objective . x` over free variables subject to `constraints`.
///
/// Free variables are split into nonnegative pairs, rows are normalized to
/// nonnegative right-hand sides, and a standard two-phase simplex runs with
/// Bland's rule throughout (entering: lowest eligible column; leaving:
/// lowest basic index among minimum ratios), which guarantees termination.
fn simplex_maximize(
    n_free: usize,
    constraints: &[Constraint],
    objective: &[Rat],
) -> SimplexResult {
    let m = constraints.len();
    // Column layout: 2*n_free split columns, then one slack/surplus column
    // per inequality row, then one artificial column per row that needs it.
    let n_split = 2 * n_free;
    let mut n_cols = n_split;
    let mut slack_col: Vec<Option<usize>> = vec![None; m];
    for (r, c) in constraints.iter().enumerate() {
        if c.op != Op::Eq {
            slack_col[r] = Some(n_cols);
            n_cols += 1;
        }
    }

    // rows[r] = coefficients, rhs[r] >= 0 after normalization.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for (r, con) in constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); n_cols];
        for (v, coeff) in con.coeffs.iter().enumerate() {
            if !coeff.is_zero() {
                row[2 * v] = coeff.clone();
                row[2 * v + 1] = -coeff.clone();
            }
        }
        if let Some(sc) = slack_col[r] {
            row[sc] = match con.op {
                Op::Le => Rat::one(),
                Op::Ge => -Rat::one(),
                Op::Eq => unreachable!(),
            };
        }
        let mut b = con.rhs.clone();
        if b.is_negative() {
            for c in &mut row {
                *c = -c.clone();
            }
            b = -b;
        }
        rows.push(row);
        rhs.push(b);
    }

    // Initial basis: the slack column where it survived normalization with
    // coefficient +1, otherwise a fresh artificial column.
    let mut basis: Vec<usize> = vec![usize::MAX; m];
    let mut artificial_from = n_cols;
    for r in 0..m {
        if let Some(sc) = slack_col[r] {
            if rows[r][sc].is_one() {
                basis[r] = sc;
                continue;
            }
        }
    }
    for r in 0..m {
        if basis[r] == usize::MAX {
            for row in rows.iter_mut() {
                row.push(Rat::zero());
            }
            rows[r][n_cols] = Rat::one();
            basis[r] = n_cols;
            n_cols += 1;
        }
    }
    let has_artificials = n_cols > artificial_from;

    // Phase 1: maximize -(sum of artificials).
    if has_artificials {
        let mut obj = vec![Rat::zero(); n_cols];
        for col in artificial_from..n_cols {
            obj[col] = -Rat::one();
        }
        let mut obj_val = Rat::zero();
        price_out(&mut obj, &mut obj_val, &rows, &rhs, &basis);
        if !run_simplex(&mut rows, &mut rhs, &mut basis, &mut obj, &mut obj_val) {
            // Bounded by construction: the phase-1 objective is <= 0.
            unreachable!("phase 1 cannot be unbounded");
        }
        if !obj_val.is_zero() {
            return SimplexResult::Infeasible;
        }
        // Drive any basic artificial (necessarily at value 0) out of the
        // basis; rows that cannot pivot are redundant and harmless.
        for r in 0..m {
            if basis[r] >= artificial_from {
                if let Some(col) = (0..artificial_from).find(|&c| !rows[r][c].is_zero()) {
                    pivot(&mut rows, &mut rhs, &mut basis, &mut obj, &mut obj_val, r, col);
                }
            }
        }
        artificial_from = artificial_from.min(n_cols);
    }

    // Phase 2: the real objective over split columns, artificials frozen.
    let mut obj = vec![Rat::zero(); n_cols];
    for v in 0..n_free {
        if !objective[v].is_zero() {
            obj[2 * v] = objective[v].clone();
            obj[2 * v + 1] = -objective[v].clone();
        }
    }
    // Never re-enter artificial columns.
    let usable = if has_artificials {
        artificial_from
    } else {
        n_cols
    };
    for row in rows.iter_mut() {
        row.truncate(usable);
    }
    obj.truncate(usable);
    // A redundant row may still carry an (out-of-range) artificial basis
    // entry; its value is zero and it never pivots again.
    let mut obj_val = Rat::zero();
    price_out(&mut obj, &mut obj_val, &rows, &rhs, &basis);
    if !run_simplex(&mut rows, &mut rhs, &mut basis, &mut obj, &mut obj_val) {
        return SimplexResult::Unbounded;
    }

    // Recover the free-variable values from the split columns.
    let mut split = vec![Rat::zero(); usable];
    for (r, &b) in basis.iter().enumerate() {
        if b < usable {
            split[b] = rhs[r].clone();
        }
    }
    let point: Vec<Rat> = (0..n_free)
        .map(|v| &split[2 * v] - &split[2 * v + 1])
        .collect();
    SimplexResult::Optimal {
        value: obj_val,
        point,
    }
}

/// Zeroes the reduced costs of the basic columns by subtracting multiples
/// of the corresponding rows from the objective.
fn price_out(
    obj: &mut [Rat],
    obj_val: &mut Rat,
    rows: &[Vec<Rat>],
    rhs: &[Rat],
    basis: &[usize],
) {
    for (r, &b) in basis.iter().enumerate() {
        if b < obj.len() && !obj[b].is_zero() {
            let f = obj[b].clone();
            for (c, coeff) in rows[r].iter().enumerate() {
                if c < obj.len() && !coeff.is_zero() {
                    let v = coeff * &f;
                    obj[c] -= v;
                }
            }
            *obj_val += &f * &rhs[r];
        }
    }
}

/// Runs simplex iterations until optimality (true) or unboundedness (false).
fn run_simplex(
    rows: &mut [Vec<Rat>],
    rhs: &mut [Rat],
    basis: &mut [usize],
    obj: &mut [Rat],
    obj_val: &mut Rat,
) -> bool {
    loop {
        // Bland: entering column is the lowest one with positive reduced cost.
        let Some(enter) = obj.iter().position(|c| c.is_positive()) else {
            return true;
        };
        // Leaving row: minimum ratio rhs/coeff over positive coefficients,
        // ties broken by the lowest basic variable index.
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..rows.len() {
            let coeff = &rows[r][enter];
            if coeff.is_positive() {
                let ratio = &rhs[r] / coeff;
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((leave, _)) = leave else {
            return false;
        };
        pivot(rows, rhs, basis, obj, obj_val, leave, enter);
    }
}

fn pivot(
    rows: &mut [Vec<Rat>],
    rhs: &mut [Rat],
    basis: &mut [usize],
    obj: &mut [Rat],
    obj_val: &mut Rat,
    r: usize,
    c: usize,
) {
    let inv = {
        let p = rows[r][c].clone();
        debug_assert!(!p.is_zero());
        Rat::one() / p
    };
    for v in rows[r].iter_mut() {
        *v *= &inv;
    }
    rhs[r] *= &inv;
    let pivot_row = rows[r].clone();
    let pivot_rhs = rhs[r].clone();
    for rr in 0..rows.len() {
        if rr == r || rows[rr][c].is_zero() {
            continue;
        }
        let f = rows[rr][c].clone();
        for (v, pv) in rows[rr].iter_mut().zip(pivot_row.iter()) {
            if !pv.is_zero() {
                let d = pv * &f;
                *v -= d;
            }
        }
        rhs[rr] -= &pivot_rhs * &f;
    }
    if c < obj.len() && !obj[c].is_zero() {
        let f = obj[c].clone();
        for (v, pv) in obj.iter_mut().zip(pivot_row.iter()) {
            if !pv.is_zero() {
                let d = pv * &f;
                *v -= d;
            }
        }
        *obj_val += &pivot_rhs * &f;
    }
    basis[r] = c;
}
