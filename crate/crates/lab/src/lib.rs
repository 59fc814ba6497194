//! Experiment driver for determinantal hypertrees: parallel sampling
//! campaigns with reproducible per-sample seeds, growth-rate estimation,
//! small-case verification by enumeration, neighborhood censuses and the
//! file formats they write.

pub mod census;
pub mod config;
mod error;
pub mod estimate;
pub mod experiment;
pub mod output;
pub mod verify;

pub use census::{census_campaign, CensusCampaign};
pub use config::{Checks, ExperimentConfig};
pub use error::{LabError, Result};
pub use estimate::{estimate_cd, GrowthEstimate, GrowthInput};
pub use experiment::{run_experiment, ExperimentReport, SampleLogLine};
pub use verify::{verify_small_cases, SmallCaseReport};
