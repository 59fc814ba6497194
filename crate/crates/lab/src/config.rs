use std::path::{Path, PathBuf};

use hypertree_core::binom::binom_checked;
use hypertree_core::local::MAX_RADIUS;
use hypertree_core::Error as CoreError;
use serde::{Deserialize, Serialize};

use crate::{LabError, Result};

/// Largest `C(n, d+1)` a campaign accepts.
pub const CAMPAIGN_LIMIT: u128 = 25_000;

/// Per-sample diagnostics to compute alongside the torsion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    /// Order `k` of the inverse-eigenvalue moment to accumulate.
    pub gendetspec: Option<usize>,
    pub near_zero: bool,
    pub census_radius: Option<usize>,
    pub gamma: Vec<f64>,
    pub omega: Vec<f64>,
    /// Also run Smith normal form and require it to match the Gram route.
    pub snf: bool,
    /// Write one `(location, weight)` CSV per sample.
    pub spectra: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            gendetspec: None,
            near_zero: true,
            census_radius: None,
            gamma: vec![0.1],
            omega: vec![10.0, 100.0],
            snf: false,
            spectra: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n_values: Vec<u32>,
    pub samples_per_n: u64,
    pub master_seed: u64,
    pub checks: Checks,
    pub output_dir: Option<PathBuf>,
    /// Permits `d = 1` (uniform spanning trees of `K_n`).
    pub allow_d1: bool,
    /// Worker threads; 0 uses the pool default. Outputs do not depend on it.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 2,
            n_values: vec![10, 15, 20],
            samples_per_n: 10,
            master_seed: 0,
            checks: Checks::default(),
            output_dir: None,
            allow_d1: false,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::Input(format!("{}: {e}", path.display())))
    }

    /// Checks parameters and the resource envelope without doing any work.
    pub fn validate(&self) -> Result<()> {
        validate_dimension(self.d, self.allow_d1)?;
        if self.n_values.is_empty() {
            return Err(LabError::Input("no n values".into()));
        }
        if self.samples_per_n == 0 {
            return Err(LabError::Input("samples_per_n must be positive".into()));
        }
        for &n in &self.n_values {
            if (n as usize) < self.d + 2 {
                return Err(LabError::Input(format!("n = {n} is below d + 2 = {}", self.d + 2)));
            }
            let faces = binom_checked(n as u64, self.d as u64 + 1).unwrap_or(u128::MAX);
            if faces > CAMPAIGN_LIMIT {
                return Err(CoreError::EnvelopeExceeded { what: "C(n, d+1)", count: faces, limit: CAMPAIGN_LIMIT }.into());
            }
        }
        if let Some(&g) = self.checks.gamma.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
            return Err(LabError::Input(format!("gamma = {g} outside (0, 1)")));
        }
        if let Some(&w) = self.checks.omega.iter().find(|w| !(**w > std::f64::consts::E && w.is_finite())) {
            return Err(LabError::Input(format!("omega = {w} must exceed e")));
        }
        if let Some(r) = self.checks.census_radius {
            if r == 0 || r > MAX_RADIUS {
                return Err(LabError::Input(format!("radius {r} outside 1..={MAX_RADIUS}")));
            }
        }
        if self.checks.gendetspec == Some(0) {
            return Err(LabError::Input("gendetspec order must be positive".into()));
        }
        Ok(())
    }
}

pub fn validate_dimension(d: usize, allow_d1: bool) -> Result<()> {
    match d {
        0 => Err(LabError::Input("d must be positive".into())),
        1 if !allow_d1 => Err(LabError::Input("d = 1 needs --allow-d1".into())),
        _ => Ok(()),
    }
}
