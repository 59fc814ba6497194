//! Smith normal form of integer matrices.
//!
//! Boundary matrices are sparse with `±1` entries, so most of the work is a
//! sparse elimination with unit pivots (each contributes an invariant factor
//! of 1 and shrinks the matrix by one row and one column). What remains is
//! a small dense core that is diagonalized with big integers using
//! minimal-absolute-value pivots.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{bareiss_big, IntMatrix};

/// Nonzero invariant factors `d_1 | d_2 | .. | d_r` of `m`, `r = rank(m)`.
pub fn smith_normal_form(m: &IntMatrix<i64>) -> Vec<BigUint> {
    let mut sparse = SparseRows::from_dense(m);
    let units = sparse.eliminate_unit_pivots();
    let core = sparse.into_dense_core(false);
    let mut factors = vec![BigUint::one(); units];
    factors.extend(diagonalize(core));
    normalize_divisibility(&mut factors);
    factors
}

/// Exact determinant of a square matrix. Unit pivots are eliminated
/// sparsely in `i64`, tracking the sign of each Laplace expansion; the
/// remaining core goes through big-integer Bareiss elimination.
pub fn sparse_determinant(m: &IntMatrix<i64>) -> BigInt {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let mut sparse = SparseRows::from_dense(m);
    let mut negate = false;
    while let Some((pr, pc)) = sparse.best_unit_pivot() {
        let ipos = sparse.row_alive[..pr].iter().filter(|&&a| a).count();
        let jpos = sparse.col_alive[..pc].iter().filter(|&&a| a).count();
        let p = sparse.rows[pr].iter().find(|&&(j, _)| j == pc).map_or(1, |&(_, v)| v);
        if !sparse.pivot(pr, pc) {
            break;
        }
        negate ^= (ipos + jpos) % 2 == 1;
        negate ^= p < 0;
    }
    let det = bareiss_big(sparse.into_dense_core(true));
    if negate {
        -det
    } else {
        det
    }
}

/// Statistics of the sparse phase, exposed for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionStats {
    pub unit_pivots: usize,
    pub core_rows: usize,
    pub core_cols: usize,
}

pub fn reduction_stats(m: &IntMatrix<i64>) -> ReductionStats {
    let mut sparse = SparseRows::from_dense(m);
    let unit_pivots = sparse.eliminate_unit_pivots();
    let core = sparse.into_dense_core(false);
    ReductionStats {
        unit_pivots,
        core_rows: core.len(),
        core_cols: core.first().map_or(0, Vec::len),
    }
}

struct SparseRows {
    rows: Vec<Vec<(usize, i64)>>,
    row_alive: Vec<bool>,
    // rows with a nonzero in each column
    col_rows: Vec<BTreeSet<usize>>,
    col_alive: Vec<bool>,
}

impl SparseRows {
    fn from_dense(m: &IntMatrix<i64>) -> Self {
        let mut rows = Vec::with_capacity(m.rows());
        let mut col_rows = vec![BTreeSet::new(); m.cols()];
        for i in 0..m.rows() {
            let row: Vec<(usize, i64)> =
                m.row(i).iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, v)).collect();
            for &(j, _) in &row {
                col_rows[j].insert(i);
            }
            rows.push(row);
        }
        SparseRows {
            row_alive: vec![true; m.rows()],
            col_alive: vec![true; m.cols()],
            rows,
            col_rows,
        }
    }

    /// Repeatedly pivots on the `±1` entry of least Markowitz cost. Stops
    /// when no unit entry is left or an update would overflow `i64`.
    fn eliminate_unit_pivots(&mut self) -> usize {
        let mut count = 0;
        while let Some((pr, pc)) = self.best_unit_pivot() {
            if !self.pivot(pr, pc) {
                break;
            }
            count += 1;
        }
        count
    }

    fn best_unit_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !self.row_alive[i] {
                continue;
            }
            let rn = row.len().saturating_sub(1);
            for &(j, v) in row {
                if v.abs() != 1 {
                    continue;
                }
                let cost = rn * (self.col_rows[j].len() - 1);
                if best.is_none_or(|b| cost < b.2) {
                    best = Some((i, j, cost));
                    if cost == 0 {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn pivot(&mut self, pr: usize, pc: usize) -> bool {
        let pivot_row = core::mem::take(&mut self.rows[pr]);
        let p = pivot_row.iter().find(|&&(j, _)| j == pc).map(|&(_, v)| v).unwrap();
        let targets: Vec<usize> = self.col_rows[pc].iter().copied().filter(|&i| i != pr).collect();
        // dry run for overflow before mutating anything
        let mut updated = Vec::with_capacity(targets.len());
        for &i in &targets {
            let a = self.rows[i].iter().find(|&&(j, _)| j == pc).map(|&(_, v)| v).unwrap();
            match axpy(&self.rows[i], &pivot_row, -(a * p)) {
                Some(row) => updated.push(row),
                None => {
                    self.rows[pr] = pivot_row;
                    return false;
                }
            }
        }
        for &(j, _) in &pivot_row {
            self.col_rows[j].remove(&pr);
        }
        for (i, row) in targets.into_iter().zip(updated) {
            for &(j, _) in &self.rows[i] {
                self.col_rows[j].remove(&i);
            }
            for &(j, _) in &row {
                self.col_rows[j].insert(i);
            }
            self.rows[i] = row;
        }
        // column pc is now zero outside the pivot row; the remaining entries
        // of the pivot row are cleared by column moves that touch nothing else
        for row in self.rows.iter_mut() {
            row.retain(|&(j, _)| j != pc);
        }
        self.col_rows[pc].clear();
        self.row_alive[pr] = false;
        self.col_alive[pc] = false;
        true
    }

    // alive rows restricted to alive columns, in order; empty rows are
    // dropped unless `keep_empty`
    fn into_dense_core(self, keep_empty: bool) -> Vec<Vec<BigInt>> {
        let cols: Vec<usize> = (0..self.col_alive.len()).filter(|&j| self.col_alive[j]).collect();
        let mut position = vec![usize::MAX; self.col_alive.len()];
        for (k, &j) in cols.iter().enumerate() {
            position[j] = k;
        }
        let mut core = Vec::new();
        for (i, row) in self.rows.into_iter().enumerate() {
            if !self.row_alive[i] || (row.is_empty() && !keep_empty) {
                continue;
            }
            let mut dense = vec![BigInt::zero(); cols.len()];
            for (j, v) in row {
                dense[position[j]] = BigInt::from(v);
            }
            core.push(dense);
        }
        if cols.is_empty() && !keep_empty {
            core.clear();
        }
        core
    }
}

// a + f * b over sorted sparse rows; None on overflow
fn axpy(a: &[(usize, i64)], b: &[(usize, i64)], f: i64) -> Option<Vec<(usize, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, f.checked_mul(b[j].1)?));
            j += 1;
        } else {
            let v = a[i].1.checked_add(f.checked_mul(b[j].1)?)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Diagonalizes a dense matrix by unimodular row and column moves and
/// returns the absolute values of the nonzero diagonal entries.
fn diagonalize(mut a: Vec<Vec<BigInt>>) -> Vec<BigUint> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut q = BigInt::zero();
    let mut tmp = BigInt::zero();
    for t in 0..rows.min(cols) {
        loop {
            // minimal |entry| in the active block
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, v) in row.iter().enumerate().skip(t) {
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| v.magnitude() < a[bi][bj].magnitude()) {
                        best = Some((i, j));
                        if v.magnitude().is_one() {
                            break;
                        }
                    }
                }
                if best.is_some_and(|(bi, bj)| a[bi][bj].magnitude().is_one()) {
                    break;
                }
            }
            let Some((bi, bj)) = best else {
                return out;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            let (head, tail) = a.split_at_mut(t + 1);
            let pivot_row = &mut head[t];
            for row in tail.iter_mut() {
                if row[t].is_zero() {
                    continue;
                }
                q.clone_from(&row[t]);
                q /= &pivot_row[t];
                if !q.is_zero() {
                    for j in t..cols {
                        if pivot_row[j].is_zero() {
                            continue;
                        }
                        tmp.clone_from(&q);
                        tmp *= &pivot_row[j];
                        row[j] -= &tmp;
                    }
                }
                clean &= row[t].is_zero();
            }
            for j in t + 1..cols {
                if pivot_row[j].is_zero() {
                    continue;
                }
                q.clone_from(&pivot_row[j]);
                q /= &pivot_row[t];
                if !q.is_zero() {
                    let qq = q.clone();
                    for row in core::iter::once(&mut *pivot_row).chain(tail.iter_mut()) {
                        if row[t].is_zero() {
                            continue;
                        }
                        tmp.clone_from(&qq);
                        tmp *= &row[t];
                        row[j] -= &tmp;
                    }
                }
                clean &= pivot_row[j].is_zero();
            }
            if clean {
                out.push(a[t][t].magnitude().clone());
                break;
            }
        }
    }
    out
}

/// Rewrites a list of positive diagonal entries into divisibility order
/// using `diag(a, b) ~ diag(gcd, lcm)`.
pub fn normalize_divisibility(factors: &mut [BigUint]) {
    let n = factors.len();
    for i in 0..n {
        for j in i + 1..n {
            if (&factors[j] % &factors[i]).is_zero() {
                continue;
            }
            let g = factors[i].gcd(&factors[j]);
            let l = &factors[i] / &g * &factors[j];
            factors[i] = g;
            factors[j] = l;
        }
    }
}

/// Product of the factors (the torsion order when the input has full
/// column rank).
pub fn factor_product(factors: &[BigUint]) -> BigUint {
    factors.iter().fold(BigUint::one(), |acc, f| acc * f)
}
