//! Exact integer linear algebra: dense matrices, Bareiss fraction-free
//! determinants and rank tests over the rationals.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero> IntMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }
}

impl<T> IntMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> IntMatrix<U> {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> IntMatrix<T>
    where
        T: Clone,
    {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }
}

impl<T> Index<(usize, usize)> for IntMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for IntMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact determinant by Bareiss fraction-free elimination. Every
/// intermediate entry is a minor of the input, so the divisions are exact.
pub fn bareiss_determinant(m: &IntMatrix<i64>) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let rows = m.data.chunks(m.cols.max(1)).take(m.rows);
    bareiss_big(rows.map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
}

/// [`bareiss_determinant`] on a square matrix given as big-integer rows.
pub fn bareiss_big(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut negate = false;
    let mut t1 = BigInt::zero();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            negate = !negate;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let pivot = &pivot_row[k];
        for row in tail.iter_mut() {
            let lead = core::mem::take(&mut row[k]);
            if lead.is_zero() {
                // a_ij = pivot * a_ij / prev
                for v in row[k + 1..].iter_mut().filter(|v| !v.is_zero()) {
                    *v *= pivot;
                    *v /= &prev;
                }
                continue;
            }
            for j in k + 1..n {
                t1.clone_from(&lead);
                t1 *= &pivot_row[j];
                row[j] *= pivot;
                row[j] -= &t1;
                row[j] /= &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a.pop().and_then(|mut r| r.pop()).unwrap_or_default();
    if negate {
        -det
    } else {
        det
    }
}

/// Rank over the rationals by fraction-free elimination. Runs in `i128`
/// and restarts with big integers if an entry overflows.
pub fn rank_over_q(m: &IntMatrix<i64>) -> usize {
    match eliminate_i128(m, false) {
        Some(r) => r,
        None => eliminate_big(m, false),
    }
}

/// True iff the columns are linearly independent over the rationals.
/// Stops at the first column without a pivot.
pub fn has_full_column_rank(m: &IntMatrix<i64>) -> bool {
    if m.cols > m.rows {
        return false;
    }
    let r = match eliminate_i128(m, true) {
        Some(r) => r,
        None => eliminate_big(m, true),
    };
    r == m.cols
}

// Column-by-column Bareiss elimination. With `abort_early`, returns the
// number of pivots found before the first pivot-free column.
fn eliminate_i128(m: &IntMatrix<i64>, abort_early: bool) -> Option<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<i128> = m.data.iter().map(|&x| x as i128).collect();
    let mut prev: i128 = 1;
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| a[i * cols + c] != 0) else {
            if abort_early {
                return Some(rank);
            }
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(rank * cols + j, p * cols + j);
            }
        }
        let pivot = a[rank * cols + c];
        for i in rank + 1..rows {
            let lead = a[i * cols + c];
            for j in c + 1..cols {
                let v = pivot
                    .checked_mul(a[i * cols + j])?
                    .checked_sub(lead.checked_mul(a[rank * cols + j])?)?;
                a[i * cols + j] = v / prev;
            }
            a[i * cols + c] = 0;
        }
        prev = pivot;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

fn eliminate_big(m: &IntMatrix<i64>, abort_early: bool) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<BigInt> = m.data.iter().map(|&x| BigInt::from(x)).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            if abort_early {
                return rank;
            }
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(rank * cols + j, p * cols + j);
            }
        }
        let pivot = a[rank * cols + c].clone();
        for i in rank + 1..rows {
            let lead = core::mem::take(&mut a[i * cols + c]);
            for j in c + 1..cols {
                let v = &pivot * &a[i * cols + j] - &lead * &a[rank * cols + j];
                a[i * cols + j] = v / &prev;
            }
        }
        prev = pivot;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank over `GF(p)` for a prime `p < 2^32`. Never exceeds the rank over
/// the rationals; equal unless `p` divides every maximal nonzero minor.
pub fn rank_mod_prime(m: &IntMatrix<i64>, p: u32) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let p = p as u64;
    let mut a: Vec<u64> = m.data.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in 0..cols {
                a.swap(rank * cols + j, piv * cols + j);
            }
        }
        let inv = powmod(a[rank * cols + c], p - 2, p);
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols..];
        for row in tail.chunks_mut(cols) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            let f = p - f * inv % p;
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + f * pivot_row[j]) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

/// Exact square root; `None` when `x` is not a perfect square.
pub fn exact_sqrt(x: &BigUint) -> Option<BigUint> {
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

pub fn to_biguint(x: &BigInt) -> Option<BigUint> {
    if x.is_negative() {
        None
    } else {
        x.to_biguint()
    }
}
