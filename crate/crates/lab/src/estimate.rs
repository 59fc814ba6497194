//! Growth-rate estimation from per-sample normalized log-torsion values.

use std::collections::BTreeMap;

use hypertree_core::binom::binom;
use hypertree_core::sampler::{derive_seed, uniform};
use hypertree_core::stats::RunningStats;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{LabError, Result};

pub const BOOTSTRAP_REPLICATES: usize = 1000;
const BOOTSTRAP_SEED: u64 = 0x0b00_75ed;

/// One sample's contribution: `log|H| / C(n,d)` by the exact route and,
/// when computed, by the spectral route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthInput {
    pub n: u32,
    pub d: usize,
    pub value: f64,
    pub spectral: Option<f64>,
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerNGrowth {
    pub n: u32,
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
    pub spectral_mean: Option<f64>,
    /// Largest `|log|H| exact − log|H| spectral|`, unnormalized.
    pub max_route_discrepancy: Option<f64>,
    /// Fraction of samples with `|H| = 1`.
    pub trivial_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub d: usize,
    pub per_n: Vec<PerNGrowth>,
    /// Mean at the largest `n`; an estimate, not a limit value.
    pub c_hat: f64,
    /// Bootstrap standard error of `c_hat`.
    pub c_hat_std_error: f64,
    pub spectral_c_hat: Option<f64>,
    /// Intercept of a least-squares line through the per-`n` means against
    /// `1/n`. Extrapolation only.
    pub trend_intercept: f64,
    /// `½ log((d+1)/e)`.
    pub lower_reference: f64,
    /// `½ log(d+1)`.
    pub upper_reference: f64,
    pub c_hat_within_references: bool,
    /// Every sample satisfies `log|H|/C(n,d) <= ½ log(d+1)`.
    pub all_below_upper: bool,
    pub max_route_discrepancy: Option<f64>,
    /// `max − min` of the means at the three largest `n`.
    pub last_three_range: Option<f64>,
}

pub fn lower_reference(d: usize) -> f64 {
    0.5 * ((d as f64 + 1.0) / std::f64::consts::E).ln()
}

pub fn upper_reference(d: usize) -> f64 {
    0.5 * (d as f64 + 1.0).ln()
}

/// Per-`n` statistics and the extrapolated growth constant. Needs records
/// for at least two distinct `n`, all of the same `d`.
pub fn estimate_cd(records: &[GrowthInput]) -> Result<GrowthEstimate> {
    let d = records.first().ok_or_else(|| LabError::Input("no records".into()))?.d;
    if records.iter().any(|r| r.d != d) {
        return Err(LabError::Input("records mix dimensions".into()));
    }
    let mut by_n: BTreeMap<u32, Vec<&GrowthInput>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().push(r);
    }
    if by_n.len() < 2 {
        return Err(LabError::Input(format!("need records for at least two n, got {}", by_n.len())));
    }
    let upper = upper_reference(d);
    let per_n: Vec<PerNGrowth> = by_n.iter().map(|(&n, rs)| per_n_stats(n, d, rs)).collect();
    let (&n_max, largest) = by_n.iter().next_back().expect("two keys");
    let last = per_n.last().expect("two entries");
    let values: Vec<f64> = largest.iter().map(|r| r.value).collect();
    let c_hat_std_error = bootstrap_std_error(&values, derive_seed(BOOTSTRAP_SEED, n_max, 0));
    let lower = lower_reference(d);
    let last_three_range = (per_n.len() >= 3).then(|| {
        let tail = &per_n[per_n.len() - 3..];
        let hi = tail.iter().map(|p| p.mean).fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().map(|p| p.mean).fold(f64::INFINITY, f64::min);
        hi - lo
    });
    let max_route_discrepancy = per_n.iter().filter_map(|p| p.max_route_discrepancy).reduce(f64::max);
    Ok(GrowthEstimate {
        d,
        c_hat: last.mean,
        c_hat_std_error,
        spectral_c_hat: last.spectral_mean,
        trend_intercept: intercept_against_inverse_n(&per_n),
        lower_reference: lower,
        upper_reference: upper,
        c_hat_within_references: last.mean > lower && last.mean < upper,
        all_below_upper: records.iter().all(|r| r.value <= upper),
        max_route_discrepancy,
        last_three_range,
        per_n,
    })
}

fn per_n_stats(n: u32, d: usize, rs: &[&GrowthInput]) -> PerNGrowth {
    let stats: RunningStats = rs.iter().map(|r| r.value).collect();
    let spectral: Vec<(f64, f64)> = rs.iter().filter_map(|r| r.spectral.map(|s| (r.value, s))).collect();
    let size = binom(n as usize, d) as f64;
    let (spectral_mean, max_route_discrepancy) = if spectral.is_empty() {
        (None, None)
    } else {
        let mean = spectral.iter().map(|p| p.1).sum::<f64>() / spectral.len() as f64;
        let gap = spectral.iter().map(|(v, s)| (v - s).abs() * size).fold(0.0, f64::max);
        (Some(mean), Some(gap))
    };
    PerNGrowth {
        n,
        samples: stats.count(),
        mean: stats.mean(),
        std_error: stats.std_error(),
        min: stats.min(),
        max: stats.max(),
        spectral_mean,
        max_route_discrepancy,
        trivial_fraction: rs.iter().filter(|r| r.trivial).count() as f64 / rs.len() as f64,
    }
}

fn bootstrap_std_error(values: &[f64], seed: u64) -> f64 {
    let len = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = RunningStats::new();
    for _ in 0..BOOTSTRAP_REPLICATES {
        let mut sum = 0.0;
        for _ in 0..len {
            let i = ((uniform(&mut rng) * len as f64) as usize).min(len - 1);
            sum += values[i];
        }
        means.push(sum / len as f64);
    }
    means.std_dev()
}

fn intercept_against_inverse_n(per_n: &[PerNGrowth]) -> f64 {
    let pts: Vec<(f64, f64)> = per_n.iter().map(|p| (1.0 / p.n as f64, p.mean)).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    my - sxy / sxx * mx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(n: u32, value: f64) -> GrowthInput {
        GrowthInput { n, d: 2, value, spectral: Some(value), trivial: false }
    }

    #[test]
    fn constant_records_give_exact_estimate() {
        let records: Vec<GrowthInput> =
            [10u32, 15, 20].iter().flat_map(|&n| (0..7).map(move |_| input(n, 0.3))).collect();
        let e = estimate_cd(&records).unwrap();
        assert_eq!(e.c_hat, 0.3);
        assert_eq!(e.c_hat_std_error, 0.0);
        assert_eq!(e.last_three_range, Some(0.0));
        assert_eq!(e.max_route_discrepancy, Some(0.0));
        assert!((e.trend_intercept - 0.3).abs() < 1e-12);
        assert!(e.c_hat_within_references && e.all_below_upper);
        assert!(e.per_n.iter().all(|p| p.std_error == 0.0 && p.samples == 7));
    }

    #[test]
    fn single_n_is_an_error() {
        let records = vec![input(10, 0.1), input(10, 0.2)];
        assert!(matches!(estimate_cd(&records), Err(LabError::Input(_))));
        assert!(estimate_cd(&[]).is_err());
        let mixed = vec![input(10, 0.1), GrowthInput { d: 3, ..input(12, 0.1) }];
        assert!(estimate_cd(&mixed).is_err());
    }

    #[test]
    fn references_for_d2() {
        assert!((upper_reference(2) - 0.549306).abs() < 1e-6);
        assert!((lower_reference(2) - 0.049306).abs() < 1e-6);
    }

    #[test]
    fn bootstrap_matches_the_standard_error() {
        let values: Vec<f64> = (0..200).map(|i| (i % 10) as f64).collect();
        let stats: RunningStats = values.iter().copied().collect();
        let se = bootstrap_std_error(&values, 3);
        assert!((se / stats.std_error() - 1.0).abs() < 0.15);
    }

    #[test]
    fn intercept_recovers_a_line() {
        let records: Vec<GrowthInput> = [10u32, 20, 40].iter().map(|&n| input(n, 0.2 - 1.5 / n as f64)).collect();
        let e = estimate_cd(&records).unwrap();
        assert!((e.trend_intercept - 0.2).abs() < 1e-12);
        assert!((e.c_hat - (0.2 - 1.5 / 40.0)).abs() < 1e-15);
    }
}
