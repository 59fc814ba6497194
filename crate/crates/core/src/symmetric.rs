//! Elementary symmetric polynomials of nonnegative arguments.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// `σ_0 .. σ_m` of `xs` by the product expansion `Π (1 + x_i t)`.
/// Every update adds nonnegative terms when `xs >= 0`, so there is no
/// cancellation.
pub fn elementary_symmetric_all(xs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; xs.len() + 1];
    e[0] = 1.0;
    for (i, &x) in xs.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `σ_k(xs)`; zero for `k > xs.len()`.
pub fn elementary_symmetric(xs: &[f64], k: usize) -> f64 {
    if k > xs.len() {
        return 0.0;
    }
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (i, &x) in xs.iter().enumerate() {
        for j in (1..=k.min(i + 1)).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e[k]
}

/// `ln σ_k(xs)` for positive `xs`, computed entirely in log space.
pub fn log_elementary_symmetric(xs: &[f64], k: usize) -> f64 {
    if k > xs.len() {
        return f64::NEG_INFINITY;
    }
    let mut le = vec![f64::NEG_INFINITY; k + 1];
    le[0] = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let lx = libm::log(x);
        for j in (1..=k.min(i + 1)).rev() {
            le[j] = log_add(le[j], lx + le[j - 1]);
        }
    }
    le[k]
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

fn check_positive(lambdas: &[f64], k: usize) -> Result<Vec<f64>> {
    if let Some(bad) = lambdas.iter().find(|&&l| l.is_nan() || l <= 0.0) {
        return Err(Error::InvalidParameters(alloc::format!("nonpositive eigenvalue {bad}")));
    }
    if k > lambdas.len() {
        return Err(Error::InvalidParameters(alloc::format!(
            "k={k} exceeds the number of eigenvalues {}",
            lambdas.len()
        )));
    }
    let mut inv: Vec<f64> = lambdas.iter().map(|l| 1.0 / l).collect();
    // descending magnitude: the large terms enter first
    inv.sort_by(|a, b| b.total_cmp(a));
    Ok(inv)
}

/// `σ_k(λ_1⁻¹, .., λ_r⁻¹)` for positive `λ`. Switches to log space when the
/// result could leave the range of `f64`.
pub fn inverse_symmetric_poly(lambdas: &[f64], k: usize) -> Result<f64> {
    let inv = check_positive(lambdas, k)?;
    let max_log = inv.first().map_or(0.0, |&x| libm::log(x).abs());
    // σ_k <= C(r,k) max^k; keep well inside the exponent range
    if (k as f64) * (max_log + libm::log(lambdas.len().max(1) as f64)) < 600.0 {
        Ok(elementary_symmetric(&inv, k))
    } else {
        Ok(libm::exp(log_elementary_symmetric(&inv, k)))
    }
}

/// `ln σ_k(λ⁻¹)`.
pub fn log_inverse_symmetric_poly(lambdas: &[f64], k: usize) -> Result<f64> {
    let inv = check_positive(lambdas, k)?;
    Ok(log_elementary_symmetric(&inv, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> f64 {
        crate::binom::binom(n, k) as f64
    }

    #[test]
    fn ones_give_binomials() {
        let ones = [1.0; 7];
        for k in 0..=7 {
            assert_eq!(elementary_symmetric(&ones, k), binom(7, k));
            assert!((inverse_symmetric_poly(&ones, k).unwrap() - binom(7, k)).abs() < 1e-12);
        }
        assert_eq!(elementary_symmetric_all(&ones)[3], 35.0);
    }

    #[test]
    fn small_cases() {
        assert!((inverse_symmetric_poly(&[2.0, 4.0], 1).unwrap() - 0.75).abs() < 1e-15);
        assert!((inverse_symmetric_poly(&[2.0, 4.0], 2).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(inverse_symmetric_poly(&[2.0, 4.0], 0).unwrap(), 1.0);
        assert_eq!(elementary_symmetric(&[1.0, 2.0], 3), 0.0);
        assert!(inverse_symmetric_poly(&[1.0, 0.0], 1).is_err());
        assert!(inverse_symmetric_poly(&[1.0, -2.0], 1).is_err());
        assert!(inverse_symmetric_poly(&[1.0], 2).is_err());
    }

    #[test]
    fn log_space_matches() {
        let xs = [0.5, 1.5, 2.0, 3.25, 0.125];
        for k in 0..=5 {
            let direct = elementary_symmetric(&xs, k);
            assert!((libm::exp(log_elementary_symmetric(&xs, k)) - direct).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn huge_values_stay_finite_in_log_space() {
        let tiny = [1e-200; 4];
        let l = log_inverse_symmetric_poly(&tiny, 4).unwrap();
        assert!((l - 4.0 * 200.0 * core::f64::consts::LN_10).abs() < 1e-9);
    }
}
