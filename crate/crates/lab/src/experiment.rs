//! Sampling campaigns: draw hypertrees for each `n`, compute torsion and
//! spectral diagnostics, aggregate, persist.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hypertree_core::binom::binom;
use hypertree_core::homology::{ln_biguint, torsion_record, within_kalai_bound, TorsionRoute};
use hypertree_core::local::{neighborhood_census, IncidenceGraph, NeighborhoodCensus};
use hypertree_core::sampler::derive_seed;
use hypertree_core::simplicial::format_face_list;
use hypertree_core::spectral::{
    empirical_measure, inverse_moment_bound, laplacian_spectrum, log_integral_above_one, log_integral_unit,
    lower_truncation_bound, near_zero_condition, spectral_log_torsion, truncated_log_lower, truncated_log_upper,
    upper_truncation_bound,
};
use hypertree_core::stats::RunningStats;
use hypertree_core::symmetric::inverse_symmetric_poly;
use hypertree_core::{Error as CoreError, HypertreeSampler, SpectralMeasure};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Checks, ExperimentConfig};
use crate::estimate::{estimate_cd, GrowthEstimate, GrowthInput};
use crate::output::{write_census_csv, write_csv, write_json, write_jsonl, write_spectral_csv};
use crate::{LabError, Result};

/// Largest allowed `|log|H| exact − log|H| spectral|` per sample.
pub const ROUTE_TOLERANCE: f64 = 1e-6;

pub const SAMPLE_LOG: &str = "samples.jsonl";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const REPORT_JSON: &str = "report.json";

/// One line of the sample log. Holds nothing that depends on timing or on
/// scheduling, so reruns with the same seed are byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleLogLine {
    pub n: u32,
    pub d: usize,
    pub sample_index: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_det: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationCheck {
    pub parameter: f64,
    pub gap: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub log_torsion: f64,
    pub spectral_log_torsion: f64,
    pub trivial: bool,
    pub kalai_ok: bool,
    pub gram_det_digits: usize,
    pub near_zero_violation: Option<bool>,
    pub lower_truncation: Vec<TruncationCheck>,
    pub upper_truncation: Vec<TruncationCheck>,
    /// `(γ, μ_n([0, γ]))`.
    pub small_mass: Vec<(f64, f64)>,
    pub inverse_moment: Option<f64>,
    pub census: Option<NeighborhoodCensus>,
    pub measure: Option<SpectralMeasure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub log: SampleLogLine,
    pub outcome: Option<SampleOutcome>,
    /// The failure broke an exact identity rather than an input condition.
    pub identity_failure: bool,
    pub wall_ms: u64,
}

impl SampleRecord {
    pub fn normalized(&self) -> Option<f64> {
        let size = binom(self.log.n as usize, self.log.d) as f64;
        self.outcome.as_ref().map(|o| o.log_torsion / size)
    }

    pub fn growth_input(&self) -> Option<GrowthInput> {
        let size = binom(self.log.n as usize, self.log.d) as f64;
        self.outcome.as_ref().map(|o| GrowthInput {
            n: self.log.n,
            d: self.log.d,
            value: o.log_torsion / size,
            spectral: Some(o.spectral_log_torsion / size),
            trivial: o.trivial,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseMomentSummary {
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
    /// `mean − 2·stderr <= bound`.
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerNDiagnostics {
    pub n: u32,
    pub samples: u64,
    pub failures: u64,
    pub near_zero_violations: Option<u64>,
    pub inverse_moment: Option<InverseMomentSummary>,
    /// Mean of `μ_n([0, γ])` per `γ`. Heuristic evidence on whether the
    /// limit measure charges 0; carries no pass/fail bound.
    pub small_mass_heuristic: Vec<(f64, f64)>,
    pub census_classes: Option<usize>,
    /// Total variation distance to the census at the previous `n`.
    pub census_tv_to_previous: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub estimate: Option<GrowthEstimate>,
    pub diagnostics: Vec<PerNDiagnostics>,
    pub violations: Vec<String>,
    #[serde(skip)]
    pub records: Vec<SampleRecord>,
    #[serde(skip)]
    pub censuses: BTreeMap<u32, NeighborhoodCensus>,
    #[serde(skip)]
    pub artifacts: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn log_lines(&self) -> impl Iterator<Item = &SampleLogLine> {
        self.records.iter().map(|r| &r.log)
    }
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    d: usize,
    n: u32,
    sample_index: u64,
    seed: u64,
    torsion_order: Option<String>,
    log_torsion_normalized: Option<f64>,
    gram_det_digits: Option<usize>,
    spectral_route_value: Option<f64>,
    wall_ms: u64,
}

/// Runs a campaign. The envelope is checked before any sampling; failed
/// samples are recorded and the run continues. When `output_dir` is set,
/// writes the sample log, the CSV summary and the JSON report there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    let mut report = pool.install(|| campaign(config))?;
    if let Some(dir) = &config.output_dir {
        report.artifacts = persist(&report, dir)?;
    }
    Ok(report)
}

fn campaign(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut ns = config.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let samplers: Vec<HypertreeSampler> =
        ns.par_iter().map(|&n| HypertreeSampler::new(n, config.d)).collect::<Result<_, _>>()?;
    let tasks: Vec<(usize, u64)> =
        (0..samplers.len()).flat_map(|j| (0..config.samples_per_n).map(move |i| (j, i))).collect();
    let mut records: Vec<SampleRecord> = tasks
        .par_iter()
        .map(|&(j, i)| run_sample(&samplers[j], &config.checks, config.master_seed, i))
        .collect();
    records.sort_by_key(|r| (r.log.n, r.log.sample_index));

    let violations = collect_violations(&records);
    let (diagnostics, censuses) = aggregate(&ns, &records, &config.checks);
    let inputs: Vec<GrowthInput> = records.iter().filter_map(SampleRecord::growth_input).collect();
    let distinct_n = inputs.iter().map(|r| r.n).collect::<std::collections::BTreeSet<_>>().len();
    let estimate = if distinct_n >= 2 { Some(estimate_cd(&inputs)?) } else { None };
    Ok(ExperimentReport {
        config: config.clone(),
        estimate,
        diagnostics,
        violations,
        records,
        censuses,
        artifacts: Vec::new(),
    })
}

pub fn run_sample(sampler: &HypertreeSampler, checks: &Checks, master_seed: u64, index: u64) -> SampleRecord {
    let (n, d) = (sampler.n(), sampler.d());
    let seed = derive_seed(master_seed, n, index);
    let start = Instant::now();
    let mut log = SampleLogLine {
        n,
        d,
        sample_index: index,
        seed,
        faces: None,
        torsion: None,
        gram_det: None,
        factors: None,
        error: None,
    };
    let result = analyze(sampler, checks, seed, &mut log);
    let wall_ms = start.elapsed().as_millis() as u64;
    match result {
        Ok(outcome) => SampleRecord { log, outcome: Some(outcome), identity_failure: false, wall_ms },
        Err(e) => {
            let identity_failure = matches!(e, CoreError::IdentityViolated(_));
            log.error = Some(e.to_string());
            SampleRecord { log, outcome: None, identity_failure, wall_ms }
        }
    }
}

fn analyze(
    sampler: &HypertreeSampler,
    checks: &Checks,
    seed: u64,
    log: &mut SampleLogLine,
) -> Result<SampleOutcome, CoreError> {
    let (n, d) = (sampler.n(), sampler.d());
    let sample = sampler.sample_seeded(seed)?;
    log.faces = Some(format_face_list(&sample.faces()));
    let b = sample.boundary();
    let route = if checks.snf { TorsionRoute::Snf } else { TorsionRoute::Gram };
    let rec = torsion_record(&b, route)?;
    log.torsion = Some(rec.order.to_string());
    log.gram_det = Some(rec.gram_det.to_string());
    log.factors = rec.invariant_factors.as_ref().map(|f| f.iter().map(BigUint::to_string).collect());

    let spectrum = laplacian_spectrum(&b)?;
    let mu = empirical_measure(&spectrum, n, d)?;
    let lambdas: Vec<f64> = spectrum.iter().filter(|&&x| x > 0.0).map(|x| x / n as f64).collect();

    let mut lower_truncation = Vec::new();
    for &gamma in &checks.gamma {
        let k = spectrum.iter().filter(|&&x| x > 0.0 && x <= gamma).count();
        let gap = truncated_log_lower(&mu, gamma)? - log_integral_unit(&mu);
        let bound = lower_truncation_bound(n, d, k);
        lower_truncation.push(TruncationCheck { parameter: gamma, gap, bound, holds: gap >= -1e-12 && gap <= bound });
    }
    let mut upper_truncation = Vec::new();
    for &omega in &checks.omega {
        let gap = (log_integral_above_one(&mu) - truncated_log_upper(&mu, omega)?).abs();
        let bound = upper_truncation_bound(d, omega);
        upper_truncation.push(TruncationCheck { parameter: omega, gap, bound, holds: gap <= bound });
    }
    let inverse_moment = match checks.gendetspec {
        Some(k) if k <= lambdas.len() => Some(inverse_symmetric_poly(&lambdas, k)?),
        Some(k) => return Err(CoreError::InvalidParameters(format!("moment order {k} exceeds {}", lambdas.len()))),
        None => None,
    };
    let census = match checks.census_radius {
        Some(r) => Some(neighborhood_census(&IncidenceGraph::new(&sample)?, r)?),
        None => None,
    };
    Ok(SampleOutcome {
        log_torsion: ln_biguint(&rec.order),
        spectral_log_torsion: spectral_log_torsion(&mu, n, d)?,
        trivial: rec.order == BigUint::from(1u32),
        kalai_ok: within_kalai_bound(n, d, &rec.order),
        gram_det_digits: rec.gram_det.to_string().len(),
        near_zero_violation: checks.near_zero.then(|| near_zero_condition(&lambdas, n, d).any_violation()),
        lower_truncation,
        upper_truncation,
        small_mass: checks.gamma.iter().map(|&g| (g, mu.mass_at_most(g))).collect(),
        inverse_moment,
        census,
        measure: checks.spectra.then_some(mu),
    })
}

fn collect_violations(records: &[SampleRecord]) -> Vec<String> {
    let mut out = Vec::new();
    for r in records {
        let tag = format!("n={} sample {}", r.log.n, r.log.sample_index);
        if r.identity_failure {
            out.push(format!("{tag}: {}", r.log.error.as_deref().unwrap_or("identity violated")));
        }
        let Some(o) = &r.outcome else { continue };
        if !o.kalai_ok {
            out.push(format!("{tag}: torsion exceeds Kalai's bound"));
        }
        let gap = (o.log_torsion - o.spectral_log_torsion).abs();
        if gap.is_nan() || gap > ROUTE_TOLERANCE {
            out.push(format!("{tag}: exact and spectral log-torsion differ by {gap:e}"));
        }
        for t in o.upper_truncation.iter().filter(|t| !t.holds) {
            out.push(format!("{tag}: upper truncation gap {:e} exceeds {:e} at omega={}", t.gap, t.bound, t.parameter));
        }
    }
    out
}

fn aggregate(
    ns: &[u32],
    records: &[SampleRecord],
    checks: &Checks,
) -> (Vec<PerNDiagnostics>, BTreeMap<u32, NeighborhoodCensus>) {
    let mut out = Vec::new();
    let mut censuses = BTreeMap::new();
    let mut previous: Option<NeighborhoodCensus> = None;
    for &n in ns {
        let at_n: Vec<&SampleRecord> = records.iter().filter(|r| r.log.n == n).collect();
        let ok: Vec<&SampleOutcome> = at_n.iter().filter_map(|r| r.outcome.as_ref()).collect();
        let inverse_moment = checks.gendetspec.filter(|_| !ok.is_empty()).map(|k| {
            let stats: RunningStats = ok.iter().filter_map(|o| o.inverse_moment).collect();
            let d = at_n[0].log.d;
            let bound = inverse_moment_bound(n, d, k);
            InverseMomentSummary {
                k,
                mean: stats.mean(),
                std_error: stats.std_error(),
                bound,
                passes: stats.mean() - 2.0 * stats.std_error() <= bound,
            }
        });
        let small_mass_heuristic = checks
            .gamma
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let mean = ok.iter().map(|o| o.small_mass[i].1).sum::<f64>() / ok.len().max(1) as f64;
                (g, mean)
            })
            .collect();
        let mut census_classes = None;
        let mut census_tv_to_previous = None;
        if let Some(r) = checks.census_radius {
            let mut pooled = NeighborhoodCensus::empty(r);
            for c in ok.iter().filter_map(|o| o.census.as_ref()) {
                pooled.merge(c).expect("equal radii");
            }
            census_classes = Some(pooled.counts.len());
            if let Some(prev) = &previous {
                census_tv_to_previous = hypertree_core::local::census_distance(prev, &pooled).ok();
            }
            previous = Some(pooled.clone());
            censuses.insert(n, pooled);
        }
        out.push(PerNDiagnostics {
            n,
            samples: ok.len() as u64,
            failures: (at_n.len() - ok.len()) as u64,
            near_zero_violations: checks
                .near_zero
                .then(|| ok.iter().filter(|o| o.near_zero_violation == Some(true)).count() as u64),
            inverse_moment,
            small_mass_heuristic,
            census_classes,
            census_tv_to_previous,
        });
    }
    (out, censuses)
}

fn persist(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let path = dir.join(SAMPLE_LOG);
    write_jsonl(&path, report.log_lines())?;
    written.push(path);

    let rows: Vec<SummaryRow> = report
        .records
        .iter()
        .map(|r| {
            let size = binom(r.log.n as usize, r.log.d) as f64;
            SummaryRow {
                d: r.log.d,
                n: r.log.n,
                sample_index: r.log.sample_index,
                seed: r.log.seed,
                torsion_order: r.log.torsion.clone(),
                log_torsion_normalized: r.normalized(),
                gram_det_digits: r.outcome.as_ref().map(|o| o.gram_det_digits),
                spectral_route_value: r.outcome.as_ref().map(|o| o.spectral_log_torsion / size),
                wall_ms: r.wall_ms,
            }
        })
        .collect();
    let path = dir.join(SUMMARY_CSV);
    write_csv(&path, &rows)?;
    written.push(path);

    for r in &report.records {
        if let Some(mu) = r.outcome.as_ref().and_then(|o| o.measure.as_ref()) {
            let path = dir.join("spectra").join(format!("n{}_s{}.csv", r.log.n, r.log.sample_index));
            write_spectral_csv(&path, mu)?;
            written.push(path);
        }
    }
    for (n, census) in &report.censuses {
        let path = dir.join(format!("census_n{n}_r{}.csv", census.radius));
        write_census_csv(&path, census)?;
        written.push(path);
    }
    let path = dir.join(REPORT_JSON);
    write_json(&path, report)?;
    written.push(path);
    Ok(written)
}

/// Rebuilds growth inputs from a sample log, recomputing the spectral
/// route from the stored faces.
pub fn growth_inputs_from_log(lines: &[SampleLogLine]) -> Result<Vec<GrowthInput>> {
    use hypertree_core::simplicial::{hypertree_boundary, parse_face_set};
    lines
        .par_iter()
        .filter(|l| l.error.is_none())
        .map(|l| {
            let (n, d) = (l.n, l.d);
            let missing = || LabError::Input(format!("n={n} sample {}: incomplete record", l.sample_index));
            let order: BigUint = l
                .torsion
                .as_deref()
                .ok_or_else(missing)?
                .parse()
                .map_err(|e| LabError::Input(format!("torsion: {e}")))?;
            let faces = parse_face_set(n, d + 1, l.faces.as_deref().ok_or_else(missing)?)?;
            let ranks: Vec<usize> = faces.iter().map(|f| f.rank()).collect();
            let b = hypertree_boundary(n, d, &ranks)?;
            let mu = empirical_measure(&laplacian_spectrum(&b)?, n, d)?;
            let size = binom(n as usize, d) as f64;
            Ok(GrowthInput {
                n,
                d,
                value: ln_biguint(&order) / size,
                spectral: Some(spectral_log_torsion(&mu, n, d)? / size),
                trivial: order == BigUint::from(1u32),
            })
        })
        .collect()
}
