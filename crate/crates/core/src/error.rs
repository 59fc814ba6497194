use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid face {vertices:?} in ambient n={n}")]
    InvalidFace { vertices: alloc::vec::Vec<u32>, n: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("face of rank {0} is not a column of the boundary matrix")]
    FaceNotPresent(usize),

    #[error("expected {expected} faces, got {got}")]
    WrongCardinality { expected: usize, got: usize },

    #[error("face set is not a hypertree (boundary matrix is rank deficient)")]
    NotAHypertree,

    #[error("negative selection mass {mass:e} for face {face} at step {step}")]
    NegativeMass { step: usize, face: usize, mass: f64 },

    #[error("selection mass {total:e} drifted from the expected {expected} at step {step}")]
    MassDrift { step: usize, total: f64, expected: f64 },

    #[error("sampled face set failed the finite-homology certificate")]
    CertificationFailed,

    #[error("{what}: {count} exceeds the envelope {limit}")]
    EnvelopeExceeded { what: &'static str, count: u128, limit: u128 },

    #[error("exact identity violated: {0}")]
    IdentityViolated(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),
}
