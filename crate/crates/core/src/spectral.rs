//! Laplacian spectra of hypertrees and their empirical spectral measure.
//!
//! For a hypertree `S` the down-up Laplacian `L = ∂_S ∂_Sᵀ` has `C(n,d)`
//! eigenvalues. The nonzero ones are the eigenvalues of the `r × r` Gram
//! matrix `∂_Sᵀ ∂_S`, which are `n` times those of the kernel block
//! `P_n[S]`. The remaining `C(n-1,d-1)` are zero.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::binom::{binom, binom_checked};
use crate::exact::IntMatrix;
use crate::sampler::{derive_seed, HypertreeSampler};
use crate::simplicial::SignedBoundaryMatrix;
use crate::stats::RunningStats;
use crate::symmetric::inverse_symmetric_poly;
use crate::{Error, Result};

/// Eigenvalues of `L` below this are the kernel.
pub const ZERO_THRESHOLD: f64 = 1e-8;

const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 10_000;

fn to_f64(m: &IntMatrix<i64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] as f64)
}

fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Ascending eigenvalues of `∂_Sᵀ ∂_S`.
pub fn gram_spectrum(b: &SignedBoundaryMatrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues(to_f64(&b.gram()))
}

/// Ascending eigenvalues of `P_n[S] = ∂_Sᵀ ∂_S / n`.
pub fn kernel_block_spectrum(b: &SignedBoundaryMatrix) -> Result<Vec<f64>> {
    let n = b.n() as f64;
    Ok(gram_spectrum(b)?.into_iter().map(|x| x / n).collect())
}

/// Ascending spectrum of `L = ∂_S ∂_Sᵀ`: the Gram spectrum padded with
/// exact zeros. The number of eigenvalues below [`ZERO_THRESHOLD`] must be
/// `C(n-1,d-1)`; anything else is an error rather than a re-threshold.
pub fn laplacian_spectrum(b: &SignedBoundaryMatrix) -> Result<Vec<f64>> {
    let gram = gram_spectrum(b)?;
    let mut out = Vec::with_capacity(b.rows());
    out.resize(b.rows().saturating_sub(gram.len()), 0.0);
    out.extend(gram.into_iter().map(|x| if x.abs() < ZERO_THRESHOLD { 0.0 } else { x }));
    out.sort_by(f64::total_cmp);
    check_kernel(b, &out)?;
    Ok(out)
}

/// Spectrum of `L` from the `C(n,d) × C(n,d)` matrix itself. Slower; used to
/// cross-check [`laplacian_spectrum`].
pub fn laplacian_spectrum_direct(b: &SignedBoundaryMatrix) -> Result<Vec<f64>> {
    let rows = b.rows();
    let mut l = DMatrix::<f64>::zeros(rows, rows);
    for c in 0..b.cols() {
        let col = b.column(c);
        for &(i, si) in col {
            for &(j, sj) in col {
                l[(i as usize, j as usize)] += (si * sj) as f64;
            }
        }
    }
    let mut v: Vec<f64> = symmetric_eigenvalues(l)?
        .into_iter()
        .map(|x| if x.abs() < ZERO_THRESHOLD { 0.0 } else { x })
        .collect();
    v.sort_by(f64::total_cmp);
    check_kernel(b, &v)?;
    Ok(v)
}

fn check_kernel(b: &SignedBoundaryMatrix, spectrum: &[f64]) -> Result<()> {
    let expected = binom(b.n() as usize - 1, b.d() - 1);
    let zeros = spectrum.iter().filter(|&&x| x < ZERO_THRESHOLD).count();
    if zeros != expected {
        return Err(Error::IdentityViolated(format!(
            "Laplacian kernel has dimension {zeros}, expected {expected}"
        )));
    }
    Ok(())
}

/// A finite atomic probability measure on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    /// Atoms are `(location, weight)`; locations must be nonnegative,
    /// weights positive and summing to one within `1e-12`.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|&(t, w)| !t.is_finite() || t < 0.0 || w.is_nan() || w <= 0.0) {
            return Err(Error::InvalidParameters("atoms need location >= 0 and weight > 0".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameters(format!("total weight {total} is not 1")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(SpectralMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Weight of the atom at exactly zero.
    pub fn zero_weight(&self) -> f64 {
        self.atoms.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum()
    }

    pub fn nonzero_atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().filter(|a| a.0 > 0.0)
    }

    /// `μ([0, t])`.
    pub fn mass_at_most(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= t).map(|a| a.1).sum()
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(t, w)| w * f(t)).sum()
    }
}

/// `μ_n = C(n,d)⁻¹ Σ δ_{λ_i}` over the spectrum of `L`. Kernel eigenvalues
/// merge into one atom at zero.
pub fn empirical_measure(spectrum: &[f64], n: u32, d: usize) -> Result<SpectralMeasure> {
    let size = binom(n as usize, d);
    if spectrum.len() != size {
        return Err(Error::InvalidParameters(format!(
            "spectrum has {} values, expected C({n},{d}) = {size}",
            spectrum.len()
        )));
    }
    let w = 1.0 / size as f64;
    let zeros = spectrum.iter().filter(|&&x| x < ZERO_THRESHOLD).count();
    let mut atoms = Vec::with_capacity(size - zeros + 1);
    if zeros > 0 {
        atoms.push((0.0, zeros as f64 / size as f64));
    }
    atoms.extend(spectrum.iter().filter(|&&x| x >= ZERO_THRESHOLD).map(|&x| (x, w)));
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(SpectralMeasure { atoms })
}

// sum w·f over atoms ordered by |log t| to limit cancellation
fn sum_log_terms(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut v: Vec<(f64, f64)> = terms.collect();
    v.sort_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
    v.into_iter().map(|(w, l)| w * l).sum()
}

/// `∫ 𝟙(t>0) log t dμ`.
pub fn log_integral(mu: &SpectralMeasure) -> Result<f64> {
    if let Some(&(t, _)) = mu.atoms.iter().find(|a| a.0 > 0.0 && a.0 < ZERO_THRESHOLD) {
        return Err(Error::Numerical(format!("atom at {t:e} is numerically zero but positive")));
    }
    Ok(sum_log_terms(mu.nonzero_atoms().map(|(t, w)| (w, libm::log(t)))))
}

/// `∫ 𝟙(0<t≤1) log t dμ`.
pub fn log_integral_unit(mu: &SpectralMeasure) -> f64 {
    sum_log_terms(mu.nonzero_atoms().filter(|a| a.0 <= 1.0).map(|(t, w)| (w, libm::log(t))))
}

/// `∫ 𝟙(t>1) log t dμ`.
pub fn log_integral_above_one(mu: &SpectralMeasure) -> f64 {
    sum_log_terms(mu.nonzero_atoms().filter(|a| a.0 > 1.0).map(|(t, w)| (w, libm::log(t))))
}

/// `log|H_{d-1}| = ½ C(n,d) ∫log dμ_n − ½ C(n-2,d-1) log n`.
pub fn spectral_log_torsion(mu: &SpectralMeasure, n: u32, d: usize) -> Result<f64> {
    let size = binom(n as usize, d) as f64;
    let corr = binom(n as usize - 2, d - 1) as f64;
    Ok(0.5 * size * log_integral(mu)? - 0.5 * corr * libm::log(n as f64))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameters(format!("γ = {gamma} outside (0, 1)")));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !omega.is_finite() || omega <= core::f64::consts::E {
        return Err(Error::InvalidParameters(format!("ω = {omega} must exceed e")));
    }
    Ok(())
}

/// Bounded continuous surrogate for `𝟙(0<t≤1) log t`, linear on `(0, γ]`.
pub fn ell_gamma(t: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(if t <= 0.0 || t > 1.0 {
        0.0
    } else if t <= gamma {
        t / gamma * libm::log(gamma)
    } else {
        libm::log(t)
    })
}

/// Bounded continuous surrogate for `𝟙(t>1) log t`, flat beyond `ω`.
pub fn h_omega(t: f64, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    Ok(if t <= 1.0 {
        0.0
    } else if t <= omega {
        libm::log(t)
    } else {
        libm::log(omega)
    })
}

/// `∫ ℓ_γ dμ`.
pub fn truncated_log_lower(mu: &SpectralMeasure, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let terms = mu.atoms.iter().map(|&(t, w)| (w, ell_gamma(t, gamma).unwrap_or(0.0)));
    Ok(sum_log_terms(terms))
}

/// `∫ h_ω dμ`.
pub fn truncated_log_upper(mu: &SpectralMeasure, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let terms = mu.atoms.iter().map(|&(t, w)| (w, h_omega(t, omega).unwrap_or(0.0)));
    Ok(sum_log_terms(terms))
}

/// Allowed gap `(n + 2k log(e C(n,d)/k)) / C(n,d)` between `∫ℓ_γ dμ_n` and
/// `∫𝟙(0<t≤1) log t dμ_n`, where `k` counts nonzero atoms at most `γ`.
pub fn lower_truncation_bound(n: u32, d: usize, k: usize) -> f64 {
    let size = binom(n as usize, d) as f64;
    (n as f64 + near_zero_slack(size, k)) / size
}

/// Jensen tail bound `(d+1) log ω / ω`.
pub fn upper_truncation_bound(d: usize, omega: f64) -> f64 {
    (d as f64 + 1.0) * libm::log(omega) / omega
}

fn near_zero_slack(size: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        let k = k as f64;
        2.0 * k * libm::log(core::f64::consts::E * size / k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearZeroReport {
    /// `satisfied[k]` for `k = 0..=r`.
    pub satisfied: Vec<bool>,
    /// Fraction of `k` that violate the condition.
    pub violating_fraction: f64,
}

impl NearZeroReport {
    pub fn any_violation(&self) -> bool {
        self.satisfied.iter().any(|s| !s)
    }
}

/// For ascending eigenvalues `λ` of `P_n[S]`, checks
/// `Σ_{i≤k} log(1/(nλ_i)) ≤ n + 2k log(e C(n,d)/k)` for every `k`.
pub fn near_zero_condition(lambdas: &[f64], n: u32, d: usize) -> NearZeroReport {
    let size = binom(n as usize, d) as f64;
    let mut satisfied = Vec::with_capacity(lambdas.len() + 1);
    satisfied.push(true);
    let mut acc = 0.0;
    for (i, &l) in lambdas.iter().enumerate() {
        acc -= libm::log(n as f64 * l);
        let k = i + 1;
        satisfied.push(acc <= n as f64 + near_zero_slack(size, k));
    }
    let bad = satisfied.iter().filter(|s| !**s).count();
    NearZeroReport { violating_fraction: bad as f64 / satisfied.len() as f64, satisfied }
}

/// `C(m-r+k, k) · C(r, k)` with `m = C(n,d+1)`, `r = C(n-1,d)`.
pub fn inverse_moment_bound(n: u32, d: usize, k: usize) -> f64 {
    let m = binom(n as usize, d + 1) as u64;
    let r = binom(n as usize - 1, d) as u64;
    let k = k as u64;
    let a = binom_checked(m - r + k, k).map_or(f64::INFINITY, |x| x as f64);
    let b = binom_checked(r, k).map_or(f64::INFINITY, |x| x as f64);
    a * b
}

/// The looser closed form `(e² m r / k²)^k`.
pub fn inverse_moment_bound_loose(n: u32, d: usize, k: usize) -> f64 {
    let m = binom(n as usize, d + 1) as f64;
    let r = binom(n as usize - 1, d) as f64;
    let k = k as f64;
    libm::pow(core::f64::consts::E * core::f64::consts::E * m * r / (k * k), k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GendetReport {
    pub n: u32,
    pub d: usize,
    pub k: usize,
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
    pub bound_loose: f64,
    /// `mean - 2·stderr <= bound`.
    pub passes: bool,
}

/// Monte Carlo estimate of `E σ_k(λ_X⁻¹)` over determinantal hypertrees,
/// with draws seeded by [`derive_seed`]`(seed, n, i)`.
pub fn gendetspec_check(
    sampler: &HypertreeSampler,
    k: usize,
    num_samples: u64,
    seed: u64,
) -> Result<GendetReport> {
    let (n, d) = (sampler.n(), sampler.d());
    let r = binom(n as usize - 1, d);
    if k == 0 || k > r {
        return Err(Error::InvalidParameters(format!("k = {k} outside 1..={r}")));
    }
    let mut stats = RunningStats::new();
    for i in 0..num_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, n, i));
        let s = sampler.sample(&mut rng)?;
        let lambdas = kernel_block_spectrum(&s.boundary())?;
        stats.push(inverse_symmetric_poly(&lambdas, k)?);
    }
    let bound = inverse_moment_bound(n, d, k);
    Ok(GendetReport {
        n,
        d,
        k,
        samples: num_samples,
        mean: stats.mean(),
        std_error: stats.std_error(),
        bound,
        bound_loose: inverse_moment_bound_loose(n, d, k),
        passes: stats.mean() - 2.0 * stats.std_error() <= bound,
    })
}
