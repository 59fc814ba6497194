use std::path::PathBuf;

use hypertree_core::Error as CoreError;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    /// 1 for failed verifications and broken identities, 2 for bad input,
    /// envelope refusals and file errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Verification(_) => 1,
            LabError::Core(e) => match e {
                CoreError::InvalidFace { .. }
                | CoreError::InvalidParameters(_)
                | CoreError::FaceNotPresent(_)
                | CoreError::WrongCardinality { .. }
                | CoreError::EnvelopeExceeded { .. }
                | CoreError::Parse(_) => 2,
                _ => 1,
            },
            _ => 2,
        }
    }
}
