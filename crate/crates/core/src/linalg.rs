//! Exact dense linear algebra: antisymmetric matrices, Pfaffians of minors,
//! determinants, and the permutation signatures used by the hyperbolic
//! polynomial builders.
//!
//! All indices in this module are zero-based.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::rat::Rat;

/// Largest dimension for which Pfaffian minors are computed by memoized
/// recursive expansion. The same index subsets recur across all minors of
/// one matrix, so sharing the table makes whole families of minors cheap.
/// Above this, plain skew Gaussian elimination per minor wins.
const MEMO_DIM_LIMIT: usize = 16;

/// Dense antisymmetric matrix over the rationals.
///
/// The constructor enforces `m[i][j] == -m[j][i]` (hence a zero diagonal),
/// so every value of this type is genuinely antisymmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntisymMatrix {
    dim: usize,
    entries: Vec<Rat>,
}

impl AntisymMatrix {
    /// Validates and wraps a row-major square matrix.
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self, CoreError> {
        let dim = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(CoreError::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate().take(i + 1) {
                if *v != -rows[j][i].clone() {
                    return Err(CoreError::NotAntisymmetric { row: i, col: j });
                }
            }
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            entries.extend(row);
        }
        Ok(Self { dim, entries })
    }

    /// The zero matrix of the given dimension.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Rat::zero(); dim * dim],
        }
    }

    /// Builds from the strict upper triangle, row by row:
    /// `upper = [m01, m02, .., m0(d-1), m12, ..]`.
    pub fn from_upper(dim: usize, upper: &[Rat]) -> Result<Self, CoreError> {
        if upper.len() != dim * (dim.saturating_sub(1)) / 2 {
            return Err(CoreError::NotSquare {
                rows: dim,
                cols: upper.len(),
            });
        }
        let mut m = Self::zero(dim);
        let mut k = 0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                m.entries[i * dim + j] = upper[k].clone();
                m.entries[j * dim + i] = -upper[k].clone();
                k += 1;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.dim + j]
    }

    /// Deletes the given rows and matching columns, preserving the order of
    /// the survivors. Indices must be in range; duplicates are rejected.
    pub fn delete_minor(&self, deleted: &[usize]) -> Result<Self, CoreError> {
        let survivors = survivors(self.dim, deleted)?;
        let dim = survivors.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for &i in &survivors {
            for &j in &survivors {
                entries.push(self.at(i, j).clone());
            }
        }
        Ok(Self { dim, entries })
    }

    /// Rows as vectors, mostly for interop and display.
    pub fn rows(&self) -> Vec<Vec<Rat>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }
}

/// Sorted survivor list after deleting `deleted` from `0..dim`.
fn survivors(dim: usize, deleted: &[usize]) -> Result<Vec<usize>, CoreError> {
    let mut gone = vec![false; dim];
    for &i in deleted {
        if i >= dim {
            return Err(CoreError::IndexOutOfRange { index: i, dim });
        }
        if gone[i] {
            return Err(CoreError::OverlappingIndices {
                description: format!("deleted index {i} repeated"),
            });
        }
        gone[i] = true;
    }
    Ok((0..dim).filter(|&i| !gone[i]).collect())
}

/// Pfaffian of the full matrix. Empty matrix gives 1, odd dimension gives 0.
pub fn pfaffian(m: &AntisymMatrix) -> Rat {
    PfaffianTable::new(m).of_all()
}

/// Shared Pfaffian-of-minors engine for one antisymmetric matrix.
///
/// For dimensions up to [`MEMO_DIM_LIMIT`] the Pfaffians of index subsets
/// are memoized, so asking for many overlapping minors (as the hyperbolic
/// polynomial sums do) costs far less than independent evaluations.
pub struct PfaffianTable<'a> {
    m: &'a AntisymMatrix,
    memo: BTreeMap<u32, Rat>,
}

impl<'a> PfaffianTable<'a> {
    pub fn new(m: &'a AntisymMatrix) -> Self {
        Self {
            m,
            memo: BTreeMap::new(),
        }
    }

    /// Pfaffian of the whole matrix.
    pub fn of_all(&mut self) -> Rat {
        let all: Vec<usize> = (0..self.m.dim).collect();
        self.of_indices(&all)
    }

    /// Pfaffian of the minor that deletes the given rows and columns.
    pub fn of_deleted(&mut self, deleted: &[usize]) -> Result<Rat, CoreError> {
        let keep = survivors(self.m.dim, deleted)?;
        Ok(self.of_indices(&keep))
    }

    /// Pfaffian of the submatrix on a sorted list of surviving indices.
    fn of_indices(&mut self, keep: &[usize]) -> Rat {
        if keep.len() % 2 == 1 {
            return Rat::zero();
        }
        if self.m.dim <= MEMO_DIM_LIMIT {
            let mut mask = 0u32;
            for &i in keep {
                mask |= 1 << i;
            }
            self.pf_mask(mask)
        } else {
            pfaffian_by_elimination(self.m, keep)
        }
    }

    /// Recursive expansion along the first surviving row, memoized on the
    /// surviving-index bitmask. Division-free.
    fn pf_mask(&mut self, mask: u32) -> Rat {
        if mask == 0 {
            return Rat::one();
        }
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let idx: Vec<usize> = (0..self.m.dim).filter(|i| mask >> i & 1 == 1).collect();
        debug_assert!(idx.len() % 2 == 0);
        let first = idx[0];
        let mut acc = Rat::zero();
        let mut plus = true;
        for &j in &idx[1..] {
            let a = self.m.at(first, j);
            if !a.is_zero() {
                let sub = self.pf_mask(mask & !(1 << first) & !(1 << j));
                let term = a * sub;
                if plus {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            plus = !plus;
        }
        self.memo.insert(mask, acc.clone());
        acc
    }
}

/// Pfaffian via skew Gaussian elimination with pivot swaps; exact, O(d^3).
/// Used for large matrices where subset memoization would not pay off.
fn pfaffian_by_elimination(m: &AntisymMatrix, keep: &[usize]) -> Rat {
    let d = keep.len();
    if d % 2 == 1 {
        return Rat::zero();
    }
    let mut a: Vec<Vec<Rat>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| m.at(i, j).clone()).collect())
        .collect();
    let mut pf = Rat::one();
    let mut k = 0;
    while k < d {
        // Find a nonzero pivot in column k below the diagonal.
        let Some(p) = (k + 1..d).find(|&r| !a[k][r].is_zero()) else {
            return Rat::zero();
        };
        if p != k + 1 {
            // Swapping a row/column pair flips the sign.
            a.swap(p, k + 1);
            for row in a.iter_mut() {
                row.swap(p, k + 1);
            }
            pf = -pf;
        }
        let pivot = a[k][k + 1].clone();
        pf *= &pivot;
        // Schur complement update of the trailing block.
        for i in (k + 2)..d {
            for j in (i + 1)..d {
                let delta = (&a[k + 1][i] * &a[k][j] - &a[k][i] * &a[k + 1][j]) / &pivot;
                let v = &a[i][j] + &delta;
                a[i][j] = v.clone();
                a[j][i] = -v;
            }
        }
        k += 2;
    }
    pf
}

/// Determinant of a dense square rational matrix by Gaussian elimination.
pub fn determinant(rows: &[Vec<Rat>]) -> Result<Rat, CoreError> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(CoreError::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
    }
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(Rat::zero());
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            for c in col..n {
                let v = &a[col][c] * &f;
                a[r][c] -= v;
            }
        }
    }
    Ok(det)
}

/// When `true`, [`signature_pair`] appends the two distinguished indices in
/// the opposite order. The literature leaves this orientation implicit; it
/// is isolated here so the whole convention can be flipped in one place.
pub const PAIR_ORDER_REVERSED: bool = false;

/// Sign of the permutation written as a sequence of its values.
fn sign_by_inversions(seq: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Builds `(0..dim minus removed) ++ tail` and returns its permutation sign.
fn extraction_sign(dim: usize, removed: &[bool], tail: &[usize]) -> i8 {
    let mut seq: Vec<usize> = (0..dim).filter(|&i| !removed[i]).collect();
    seq.extend_from_slice(tail);
    sign_by_inversions(&seq)
}

fn removal_flags(
    dim: usize,
    set: &[usize],
    extra: &[usize],
) -> Result<(Vec<bool>, Vec<usize>), CoreError> {
    let mut removed = vec![false; dim];
    let mut mark = |i: usize| -> Result<(), CoreError> {
        if i >= dim {
            return Err(CoreError::IndexOutOfRange { index: i, dim });
        }
        if removed[i] {
            return Err(CoreError::OverlappingIndices {
                description: format!("index {i} appears twice in the extraction"),
            });
        }
        removed[i] = true;
        Ok(())
    };
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    for &i in &sorted {
        mark(i)?;
    }
    for &i in extra {
        mark(i)?;
    }
    Ok((removed, sorted))
}

/// Sign of the permutation that deletes `set ∪ {tau}` from `(0..dim)` and
/// appends `tau` followed by `set` in decreasing order:
/// `(rest.., tau, s_k, .., s_1)`.
pub fn signature_single(dim: usize, set: &[usize], tau: usize) -> Result<i8, CoreError> {
    let (removed, sorted) = removal_flags(dim, set, &[tau])?;
    let mut tail = vec![tau];
    tail.extend(sorted.iter().rev());
    Ok(extraction_sign(dim, &removed, &tail))
}

/// Sign of the permutation that deletes `set` from `(0..dim)` and appends
/// `set` in decreasing order: `(rest.., s_k, .., s_1)`.
pub fn signature_set(dim: usize, set: &[usize]) -> Result<i8, CoreError> {
    let (removed, sorted) = removal_flags(dim, set, &[])?;
    let tail: Vec<usize> = sorted.iter().rev().copied().collect();
    Ok(extraction_sign(dim, &removed, &tail))
}

/// Two-index variant of [`signature_single`]: deletes `set ∪ {tau1, tau2}`
/// and appends `tau1, tau2` followed by `set` in decreasing order, i.e. the
/// second index is extracted first and `tau1` then lands in front of it.
/// Swapping `tau1` and `tau2` flips the sign. See [`PAIR_ORDER_REVERSED`].
pub fn signature_pair(
    dim: usize,
    set: &[usize],
    tau1: usize,
    tau2: usize,
) -> Result<i8, CoreError> {
    let (a, b) = if PAIR_ORDER_REVERSED {
        (tau2, tau1)
    } else {
        (tau1, tau2)
    };
    let (removed, sorted) = removal_flags(dim, set, &[a, b])?;
    let mut tail = vec![a, b];
    tail.extend(sorted.iter().rev());
    Ok(extraction_sign(dim, &removed, &tail))
}
