//! The order of `H_{d-1}(S, ℤ)` for complexes with complete `(d-1)`-skeleton.
//!
//! Two independent exact routes are available:
//!
//! * Smith normal form of the boundary matrix `∂_S`: `|H_{d-1}|` is the
//!   product of its invariant factors.
//! * The Gram determinant `π = det(∂_Sᵀ ∂_S)`, which equals
//!   `n^C(n-2,d-1) · |H_{d-1}|²` for hypertrees.
//!
//! The Gram route is a single big-integer determinant and is the default for
//! large inputs; the SNF route is used for small `n` or when the invariant
//! factors themselves are wanted.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Pow, Zero};

use crate::binom::binom;
use crate::exact::{exact_sqrt, has_full_column_rank, rank_mod_prime, IntMatrix};
use crate::simplicial::SignedBoundaryMatrix;
use crate::snf::{factor_product, smith_normal_form, sparse_determinant};
use crate::{Error, Result};

/// Largest `n` for which [`TorsionRoute::Auto`] runs the SNF route.
pub const SNF_AUTO_MAX_N: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionRecord {
    /// `|H_{d-1}(S, ℤ)|`.
    pub order: BigUint,
    /// Invariant factors `d_1 | d_2 | ..` of `∂_S` when computed.
    pub invariant_factors: Option<Vec<BigUint>>,
    /// `det(∂_Sᵀ ∂_S)`.
    pub gram_det: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TorsionRoute {
    Snf,
    Gram,
    #[default]
    Auto,
}

fn check_hypertree_shape(b: &SignedBoundaryMatrix) -> Result<()> {
    let expected = binom(b.n() as usize - 1, b.d());
    if b.cols() != expected {
        return Err(Error::WrongCardinality { expected, got: b.cols() });
    }
    Ok(())
}

/// `n^C(n-2, d-1)`, the factor relating the Gram determinant to `|H|²`.
pub fn gram_scale(n: u32, d: usize) -> BigUint {
    let e = binom(n as usize - 2, d - 1);
    Pow::pow(BigUint::from(n), e)
}

/// `det(∂_Sᵀ ∂_S)` by sparse unit-pivot elimination followed by Bareiss on
/// the remaining core. Errors if `∂_S` is rank
/// deficient.
pub fn gram_determinant(b: &SignedBoundaryMatrix) -> Result<BigUint> {
    let det = sparse_determinant(&b.gram());
    if det.is_zero() {
        return Err(Error::NotAHypertree);
    }
    det.to_biguint()
        .ok_or_else(|| Error::IdentityViolated("Gram determinant is negative".into()))
}

/// Torsion order from the Gram determinant: the exact square root of
/// `π / n^C(n-2,d-1)`. A remainder anywhere is an error, never rounded.
pub fn torsion_from_gram(n: u32, d: usize, gram_det: &BigUint) -> Result<BigUint> {
    let scale = gram_scale(n, d);
    let (q, rem) = gram_det.div_rem(&scale);
    if !rem.is_zero() {
        return Err(Error::IdentityViolated(format!(
            "Gram determinant not divisible by n^C(n-2,d-1) at n={n}, d={d}"
        )));
    }
    exact_sqrt(&q).ok_or_else(|| {
        Error::IdentityViolated(format!("π / n^C(n-2,d-1) is not a perfect square at n={n}, d={d}"))
    })
}

/// Invariant factors of `∂_S`. Errors if `∂_S` is rank deficient.
pub fn invariant_factors(b: &SignedBoundaryMatrix) -> Result<Vec<BigUint>> {
    let factors = smith_normal_form(&b.to_dense());
    if factors.len() != b.cols() {
        return Err(Error::NotAHypertree);
    }
    Ok(factors)
}

/// `|H_{d-1}(S, ℤ)|` for a hypertree boundary matrix.
pub fn torsion_order(b: &SignedBoundaryMatrix) -> Result<BigUint> {
    Ok(torsion_record(b, TorsionRoute::Auto)?.order)
}

/// Computes the full record. The Gram determinant is always computed; with
/// the SNF route the two routes are cross-checked and any disagreement is
/// reported as an identity violation.
pub fn torsion_record(b: &SignedBoundaryMatrix, route: TorsionRoute) -> Result<TorsionRecord> {
    check_hypertree_shape(b)?;
    let use_snf = match route {
        TorsionRoute::Snf => true,
        TorsionRoute::Gram => false,
        TorsionRoute::Auto => b.n() <= SNF_AUTO_MAX_N,
    };
    let gram_det = gram_determinant(b)?;
    let from_gram = torsion_from_gram(b.n(), b.d(), &gram_det)?;
    if !use_snf {
        return Ok(TorsionRecord { order: from_gram, invariant_factors: None, gram_det });
    }
    let factors = invariant_factors(b)?;
    let order = factor_product(&factors);
    if order != from_gram {
        return Err(Error::IdentityViolated(format!(
            "SNF torsion {order} differs from Gram-route torsion {from_gram}"
        )));
    }
    Ok(TorsionRecord { order, invariant_factors: Some(factors), gram_det })
}

/// `∂_S` restricted to the rows of `(d-1)`-faces avoiding vertex 1: a square
/// `C(n-1,d)` matrix for hypertree-sized `S`. Projection onto these
/// coordinates identifies the `(d-1)`-cycles of the full skeleton with
/// `ℤ^{C(n-1,d)}`, so `H_{d-1}(S) ≅ coker` of this matrix.
pub fn reduced_boundary(b: &SignedBoundaryMatrix) -> IntMatrix<i64> {
    let offset = binom(b.n() as usize - 1, b.d() - 1);
    let rows = b.rows() - offset;
    let mut m = IntMatrix::zeros(rows, b.cols());
    for (r, c, s) in b.triplets() {
        if r >= offset {
            m[(r - offset, c)] = s as i64;
        }
    }
    m
}

/// Certificate that `faces` spans a hypertree: the right cardinality and
/// `H_{d-1}` finite, i.e. the reduced square boundary matrix is nonsingular
/// over ℚ. Tries two 31-bit primes before falling back to exact
/// fraction-free elimination.
pub fn is_hypertree(n: u32, d: usize, faces: &[usize]) -> Result<bool> {
    let r = binom(n as usize - 1, d);
    if faces.len() != r {
        return Ok(false);
    }
    let b = crate::simplicial::hypertree_boundary(n, d, faces)?;
    if b.cols() != r {
        return Ok(false);
    }
    let reduced = reduced_boundary(&b);
    for p in [2_147_483_647u32, 2_147_483_629] {
        if rank_mod_prime(&reduced, p) == r {
            return Ok(true);
        }
    }
    Ok(has_full_column_rank(&reduced))
}

/// Kalai's bound `|H_{d-1}| <= sqrt(d+1)^C(n-1,d)`, checked exactly as
/// `|H|² <= (d+1)^C(n-1,d)`.
pub fn within_kalai_bound(n: u32, d: usize, order: &BigUint) -> bool {
    let bound = Pow::pow(BigUint::from(d as u32 + 1), binom(n as usize - 1, d));
    order * order <= bound
}

/// Natural log of a big unsigned integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        let f = x.iter_u64_digits().rev().fold(0.0f64, |acc, d| acc * 18446744073709551616.0 + d as f64);
        return libm::log(f);
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let f = top.iter_u64_digits().next().unwrap_or(0) as f64;
    libm::log(f) + shift as f64 * core::f64::consts::LN_2
}
