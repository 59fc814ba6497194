//! The orthogonal projection `P_n = (1/n) ∂ᵀ∂` onto the `d`-coboundaries of
//! the simplex on `[n]`, and bases of its range.
//!
//! `P_n` is stored sparsely: two `d`-faces interact only if they share a
//! facet, so each row has `1 + (d+1)(n-d-1)` nonzeros.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::binom::binom;
use crate::simplicial::{boundary_matrix, SignedBoundaryMatrix};
use crate::{Error, Result};

/// Largest number of `d`-faces the sampler accepts (`n <= 50` at `d = 2`).
pub const MAX_FACES: usize = 25_000;

/// Largest size for which dense copies of the kernel or cobasis are built.
pub const MAX_DENSE: usize = 6_000;

pub(crate) fn check_envelope(n: u32, d: usize) -> Result<usize> {
    if d == 0 || (n as usize) < d + 1 {
        return Err(Error::InvalidParameters(format!("need n >= d+1 >= 2, got n={n}, d={d}")));
    }
    let faces = crate::binom::binom_checked(n as u64, d as u64 + 1).unwrap_or(u128::MAX);
    if faces > MAX_FACES as u128 {
        return Err(Error::EnvelopeExceeded {
            what: "number of d-faces C(n,d+1)",
            count: faces,
            limit: MAX_FACES as u128,
        });
    }
    Ok(faces as usize)
}

/// Symmetric sparse projection kernel indexed by `d`-face ranks.
#[derive(Debug, Clone)]
pub struct ProjectionKernel {
    n: u32,
    d: usize,
    rank: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

/// Builds `P_n = (1/n) ∂_{n,d}ᵀ ∂_{n,d}`.
pub fn projection_kernel(n: u32, d: usize) -> Result<ProjectionKernel> {
    check_envelope(n, d)?;
    let b = boundary_matrix(n, d)?;
    Ok(ProjectionKernel::from_boundary(&b))
}

impl ProjectionKernel {
    fn from_boundary(b: &SignedBoundaryMatrix) -> Self {
        let (n, d) = (b.n(), b.d());
        let size = b.cols();
        let mut by_row: Vec<Vec<(u32, i8)>> = vec![Vec::new(); b.rows()];
        for (r, c, s) in b.triplets() {
            by_row[r].push((c as u32, s));
        }
        let scale = 1.0 / n as f64;
        let mut row_ptr = Vec::with_capacity(size + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut acc: Vec<(u32, i32)> = Vec::new();
        for c in 0..size {
            acc.clear();
            for &(r, s) in b.column(c) {
                for &(other, t) in &by_row[r as usize] {
                    acc.push((other, (s * t) as i32));
                }
            }
            acc.sort_unstable_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < acc.len() {
                let j = acc[k].0;
                let mut v = 0;
                while k < acc.len() && acc[k].0 == j {
                    v += acc[k].1;
                    k += 1;
                }
                if v != 0 {
                    col_idx.push(j);
                    values.push(v as f64 * scale);
                }
            }
            row_ptr.push(col_idx.len());
        }
        ProjectionKernel { n, d, rank: binom(n as usize - 1, d), row_ptr, col_idx, values }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of rows, `C(n, d+1)`.
    pub fn size(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// `C(n-1, d)`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().zip(&self.values[range]).map(|(&j, &v)| (j as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size()).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// `max |P_ij - P_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.size() {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `max |(P²)_ij - P_ij|` over all entries, using the sparsity of `P`.
    pub fn idempotence_defect(&self) -> f64 {
        let size = self.size();
        let mut dense_row = vec![0.0f64; size];
        let mut touched: Vec<usize> = Vec::new();
        let mut worst = 0.0f64;
        for i in 0..size {
            for (k, pik) in self.row(i) {
                for (j, pkj) in self.row(k) {
                    if dense_row[j] == 0.0 {
                        touched.push(j);
                    }
                    dense_row[j] += pik * pkj;
                }
            }
            for (j, pij) in self.row(i) {
                if dense_row[j] == 0.0 {
                    touched.push(j);
                }
                dense_row[j] -= pij;
            }
            for &j in &touched {
                worst = worst.max(dense_row[j].abs());
                dense_row[j] = 0.0;
            }
            touched.clear();
        }
        worst
    }

    /// Principal submatrix `P[A]` for face ranks `faces`.
    pub fn submatrix(&self, faces: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(faces.len(), faces.len(), |a, b| self.get(faces[a], faces[b]))
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.size() > MAX_DENSE {
            return Err(Error::EnvelopeExceeded {
                what: "dense kernel size",
                count: self.size() as u128,
                limit: MAX_DENSE as u128,
            });
        }
        Ok(self.submatrix(&(0..self.size()).collect::<Vec<_>>()))
    }

    /// Eigenvalues of the full kernel, ascending. Dense; small sizes only.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let dense = self.to_dense()?;
        let mut ev: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// `det P[A]`, the probability that the determinantal hypertree has
    /// `d`-faces exactly `A`. Requires `|A| = C(n-1, d)`.
    pub fn subset_probability(&self, faces: &[usize]) -> Result<f64> {
        if faces.len() != self.rank {
            return Err(Error::WrongCardinality { expected: self.rank, got: faces.len() });
        }
        if let Some(&bad) = faces.iter().find(|&&f| f >= self.size()) {
            return Err(Error::FaceNotPresent(bad));
        }
        let sub = self.submatrix(faces);
        // P[A] is PSD; Cholesky fails exactly when it is (numerically) singular
        let det = match sub.clone().cholesky() {
            Some(ch) => ch.l().diagonal().iter().map(|x| x * x).product(),
            None => sub.determinant(),
        };
        Ok(det.clamp(0.0, 1.0))
    }

    /// `Σ_{|A|=k} det P[A]`, evaluated as `σ_k` of the kernel spectrum.
    pub fn principal_minor_sum(&self, k: usize) -> Result<f64> {
        if k > self.rank {
            return Err(Error::InvalidParameters(format!("k={k} exceeds rank {}", self.rank)));
        }
        let spectrum = self.spectrum()?;
        Ok(crate::symmetric::elementary_symmetric(&spectrum, k))
    }
}

/// The `r = C(n-1,d)` coboundaries `δτ` of the `(d-1)`-faces `τ` avoiding
/// vertex 1. They form a basis of the range of `∂ᵀ`: `δτ` is the only one
/// with a nonzero entry at `τ ∪ {1}`. Row `i` of the basis matrix `A`
/// (one row per `d`-face) has at most `d+1` nonzeros.
#[derive(Debug, Clone)]
pub struct Cobasis {
    n: u32,
    d: usize,
    rank: usize,
    // sparse rows of A: (column in 0..r, sign)
    rows: Vec<Vec<(u32, f64)>>,
    // G^{-1} for the Gram matrix G = AᵀA, dense r x r
    gram_inverse: DMatrix<f64>,
    // G = L Lᵀ
    gram_cholesky_l: DMatrix<f64>,
}

impl Cobasis {
    pub fn new(n: u32, d: usize) -> Result<Self> {
        check_envelope(n, d)?;
        let b = boundary_matrix(n, d)?;
        let offset = binom(n as usize - 1, d - 1);
        let rank = binom(n as usize - 1, d);
        let rows: Vec<Vec<(u32, f64)>> = (0..b.cols())
            .map(|c| {
                b.column(c)
                    .iter()
                    .filter(|&&(r, _)| r as usize >= offset)
                    .map(|&(r, s)| (r - offset as u32, s as f64))
                    .collect()
            })
            .collect();
        let mut gram = DMatrix::<f64>::zeros(rank, rank);
        for row in &rows {
            for &(a, x) in row {
                for &(b2, y) in row {
                    gram[(a as usize, b2 as usize)] += x * y;
                }
            }
        }
        let chol = gram.cholesky().ok_or_else(|| {
            Error::Numerical(format!("coboundary Gram matrix not positive definite at n={n}, d={d}"))
        })?;
        let gram_inverse = chol.inverse();
        let gram_cholesky_l = chol.unpack();
        Ok(Cobasis { n, d, rank, rows, gram_inverse, gram_cholesky_l })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of `d`-faces.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn sparse_row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub(crate) fn gram_inverse(&self) -> &DMatrix<f64> {
        &self.gram_inverse
    }

    /// `P_ii = a_iᵀ G⁻¹ a_i`.
    pub fn kernel_diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                let mut s = 0.0;
                for &(a, x) in row {
                    for &(b, y) in row {
                        s += x * y * self.gram_inverse[(a as usize, b as usize)];
                    }
                }
                s
            })
            .collect()
    }

    /// Numerical rank of `A` from the singular values `sqrt(eig(AᵀA))`,
    /// relative threshold `tol`. Works above the dense envelope.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let g = &self.gram_cholesky_l * self.gram_cholesky_l.transpose();
        let sv: Vec<f64> = g.symmetric_eigenvalues().iter().map(|&x| libm::sqrt(x.max(0.0))).collect();
        let top = sv.iter().copied().fold(0.0f64, f64::max);
        sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
    }

    /// Dense orthonormal basis `U = A L⁻ᵀ` of the coboundary space.
    pub fn orthonormal(&self) -> Result<DMatrix<f64>> {
        if self.size() > MAX_DENSE {
            return Err(Error::EnvelopeExceeded {
                what: "dense cobasis rows",
                count: self.size() as u128,
                limit: MAX_DENSE as u128,
            });
        }
        let mut u = DMatrix::<f64>::zeros(self.size(), self.rank);
        let mut rhs = DVector::<f64>::zeros(self.rank);
        for (i, row) in self.rows.iter().enumerate() {
            rhs.fill(0.0);
            for &(a, x) in row {
                rhs[a as usize] = x;
            }
            // row i of A L^{-T} is (L^{-1} a_i)^T
            let solved = self
                .gram_cholesky_l
                .solve_lower_triangular(&rhs)
                .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
            u.set_row(i, &solved.transpose());
        }
        Ok(u)
    }
}

/// Orthonormal basis of the range of `∂_{n,d}ᵀ`, shape `C(n,d+1) × C(n-1,d)`.
pub fn orthonormal_cobasis(n: u32, d: usize) -> Result<DMatrix<f64>> {
    Cobasis::new(n, d)?.orthonormal()
}

/// Numerical rank from singular values, relative threshold `tol`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let top = sv.iter().copied().fold(0.0f64, f64::max);
    sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_vertex_kernel() {
        let p = projection_kernel(4, 2).unwrap();
        assert_eq!(p.size(), 4);
        assert_eq!(p.rank(), 3);
        for i in 0..4 {
            assert!((p.get(i, i) - 0.75).abs() < 1e-15);
            for j in 0..4 {
                if i != j {
                    assert!((p.get(i, j).abs() - 0.25).abs() < 1e-15);
                }
            }
        }
        assert!(p.idempotence_defect() < 1e-12);
        assert!((p.trace() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn subset_probability_errors() {
        let p = projection_kernel(4, 2).unwrap();
        assert!(matches!(
            p.subset_probability(&[0, 1]),
            Err(Error::WrongCardinality { expected: 3, got: 2 })
        ));
        assert!(matches!(p.subset_probability(&[0, 1, 9]), Err(Error::FaceNotPresent(9))));
        assert!(p.principal_minor_sum(4).is_err());
    }

    #[test]
    fn envelope() {
        assert!(matches!(projection_kernel(60, 2), Err(Error::EnvelopeExceeded { .. })));
        assert!(projection_kernel(2, 2).is_err());
    }

    #[test]
    fn cobasis_small() {
        let u = orthonormal_cobasis(4, 2).unwrap();
        assert_eq!(u.shape(), (4, 3));
        let gram = u.transpose() * &u;
        assert!((gram - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-12);
    }
}
