use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypertree_lab::experiment::{growth_inputs_from_log, SAMPLE_LOG};
use hypertree_lab::output::{read_jsonl, write_census_csv, write_json, EnumerationDocument};
use hypertree_lab::verify::{enumerate_parallel, sampler_law_test};
use hypertree_lab::{
    census_campaign, estimate_cd, run_experiment, verify_small_cases, ExperimentConfig, LabError, Result,
    SampleLogLine,
};

/// Determinantal hypertree experiments.
#[derive(Parser)]
#[command(name = "hypertree-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample hypertrees and write the sample log, CSV summary and report.
    Sample(CampaignArgs),
    /// Enumerate every hypertree at one (n, d) and write it as JSON.
    Enumerate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_d1: bool,
    },
    /// Check Kalai's formula and the sampling law for all feasible n up to --n.
    Verify {
        #[arg(long)]
        d: usize,
        /// Largest n to try.
        #[arg(long)]
        n: u32,
        /// Sampler draws per n for the chi-squared test; 0 skips it.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_d1: bool,
    },
    /// Estimate the growth constant, from a sample log or a fresh campaign.
    Estimate {
        /// A samples.jsonl file, or a directory containing one.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        campaign: CampaignArgs,
    },
    /// Pool rooted-neighborhood censuses across samples at each n.
    Census {
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long, default_value_t = 10)]
        samples: u64,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_d1: bool,
    },
}

#[derive(Args, Clone, Default)]
struct CampaignArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u32>>,
    /// Samples per n.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    omega: Option<Vec<f64>>,
    /// Census radius.
    #[arg(long)]
    radius: Option<usize>,
    /// Order k of the inverse-eigenvalue moment check.
    #[arg(long)]
    moment: Option<usize>,
    /// Cross-check every torsion with Smith normal form.
    #[arg(long)]
    snf: bool,
    /// Write each sample's spectral measure as CSV.
    #[arg(long)]
    spectra: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    allow_d1: bool,
    /// Worker threads (0: all cores). Outputs do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl CampaignArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(d) = self.d {
            c.d = d;
        }
        if let Some(n) = &self.n {
            c.n_values = n.clone();
        }
        if let Some(s) = self.samples {
            c.samples_per_n = s;
        }
        if let Some(s) = self.seed {
            c.master_seed = s;
        }
        if let Some(g) = &self.gamma {
            c.checks.gamma = g.clone();
        }
        if let Some(w) = &self.omega {
            c.checks.omega = w.clone();
        }
        if self.radius.is_some() {
            c.checks.census_radius = self.radius;
        }
        if self.moment.is_some() {
            c.checks.gendetspec = self.moment;
        }
        c.checks.snf |= self.snf;
        c.checks.spectra |= self.spectra;
        if self.out.is_some() {
            c.output_dir = self.out.clone();
        }
        c.allow_d1 |= self.allow_d1;
        c.workers = self.workers;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// `Ok(false)` means a verification failed.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Sample(args) => {
            let report = run_experiment(&args.config()?)?;
            for line in &report.violations {
                eprintln!("violation: {line}");
            }
            let failed = report.records.iter().filter(|r| r.outcome.is_none()).count();
            eprintln!("{} samples, {failed} failed", report.records.len());
            for p in &report.artifacts {
                eprintln!("wrote {}", p.display());
            }
            print_json(&report)?;
            Ok(report.passed())
        }
        Command::Enumerate { d, n, out, allow_d1 } => {
            hypertree_lab::config::validate_dimension(d, allow_d1)?;
            let res = enumerate_parallel(n, d)?;
            let doc = EnumerationDocument::new(&res);
            match out {
                Some(dir) => {
                    let path = dir.join(format!("enumeration_n{n}_d{d}.json"));
                    write_json(&path, &doc)?;
                    eprintln!("wrote {}", path.display());
                    print_json(&doc.summary)?;
                }
                None => print_json(&doc)?,
            }
            Ok(res.kalai_holds())
        }
        Command::Verify { d, n, samples, seed, alpha, out, allow_d1 } => {
            let report = verify_small_cases(d, n, allow_d1)?;
            for s in &report.skipped {
                eprintln!("skipped: {}", s.notice);
            }
            let mut passed = report.passed();
            let mut fits = Vec::new();
            if samples > 0 {
                for case in &report.cases {
                    let fit = sampler_law_test(case.n, d, samples, seed, alpha)?;
                    passed &= fit.passes();
                    fits.push(fit);
                }
            }
            let doc = serde_json::json!({ "small_cases": report, "goodness_of_fit": fits, "passed": passed });
            if let Some(dir) = out {
                write_json(&dir.join(format!("verify_d{d}.json")), &doc)?;
            }
            print_json(&doc)?;
            Ok(passed)
        }
        Command::Estimate { input, campaign } => {
            let estimate = match input {
                Some(path) => {
                    let path = if path.is_dir() { path.join(SAMPLE_LOG) } else { path };
                    let lines: Vec<SampleLogLine> = read_jsonl(&path)?;
                    estimate_cd(&growth_inputs_from_log(&lines)?)?
                }
                None => {
                    let report = run_experiment(&campaign.config()?)?;
                    for line in &report.violations {
                        eprintln!("violation: {line}");
                    }
                    report.estimate.ok_or_else(|| LabError::Input("estimation needs at least two n".into()))?
                }
            };
            if let Some(dir) = &campaign.out {
                write_json(&dir.join("estimate.json"), &estimate)?;
            }
            print_json(&estimate)?;
            Ok(estimate.all_below_upper
                && estimate.max_route_discrepancy.is_none_or(|g| g <= hypertree_lab::experiment::ROUTE_TOLERANCE))
        }
        Command::Census { d, n, samples, radius, seed, out, allow_d1 } => {
            let campaign = census_campaign(d, &n, samples, radius, seed, allow_d1)?;
            if let Some(dir) = &out {
                write_censuses(dir, &campaign)?;
            }
            let summary = campaign.summary();
            print_json(&summary)?;
            Ok(summary.mean_degree_exact && summary.high_degrees_constant)
        }
    }
}

fn write_censuses(dir: &Path, campaign: &hypertree_lab::CensusCampaign) -> Result<()> {
    for at in &campaign.per_n {
        write_census_csv(&dir.join(format!("census_n{}_r{}.csv", at.n, campaign.radius)), &at.census)?;
    }
    write_json(&dir.join("census_summary.json"), &campaign.summary())
}
