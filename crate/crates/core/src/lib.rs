//! Determinantal hypertrees on `[n]`: projection-DPP sampling, exact
//! codimension-one integral homology, Laplacian spectral measures and the
//! rooted-neighborhood census of the face incidence graph.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! campaigns and the command line live in the `hypertree-lab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod binom;
pub mod canon;
pub mod enumerate;
mod error;
pub mod exact;
pub mod homology;
pub mod kernel;
pub mod local;
pub mod sampler;
pub mod simplicial;
pub mod snf;
pub mod spectral;
pub mod stats;
pub mod symmetric;

pub use enumerate::{enumerate_hypertrees, EnumerationResult, EnumeratedHypertree};
pub use error::{Error, Result};
pub use homology::{gram_determinant, torsion_order, torsion_record, TorsionRecord};
pub use kernel::{orthonormal_cobasis, projection_kernel, ProjectionKernel};
pub use sampler::{HypertreeSample, HypertreeSampler};
pub use simplicial::{boundary_matrix, face_rank, face_unrank, Face, SignedBoundaryMatrix};
pub use spectral::SpectralMeasure;
