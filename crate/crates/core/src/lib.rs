//! Distributed compressed estimation over wireless sensor networks.
//!
//! The crate simulates a network of sensors that jointly estimate a sparse
//! parameter vector. Three families of estimators are provided:
//!
//! * diffusion NLMS in the full parameter dimension, with an optional
//!   zero-attracting shrinkage term for sparse targets;
//! * compressed-domain diffusion (DCE), where every node works on a
//!   `D`-dimensional projection of the regressor, exchanges only `D`
//!   coefficients per round, and decompresses with orthogonal matching
//!   pursuit at the end;
//! * DCE with measurement matrices that are adapted online by stochastic
//!   steepest descent.
//!
//! The [`harness`] module ties these together into seeded Monte-Carlo
//! experiments that emit CSV learning curves.
//!
//! ```
//! use dce::recovery::{omp_reconstruct, OmpConfig};
//! use dce::compression::MeasurementMatrix;
//! use num_complex::Complex64;
//!
//! let phi = MeasurementMatrix::identity(3);
//! let y = vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, -1.0), Complex64::new(0.0, 0.0)];
//! let out = omp_reconstruct(&phi, &y, &OmpConfig::new(1)).unwrap();
//! assert_eq!(out.support, vec![1]);
//! assert!((out.estimate[1] - y[1]).norm() < 1e-12);
//! ```

pub mod compression;
pub mod cvec;
pub mod estimators;
pub mod harness;
pub mod metrics;
pub mod recovery;
pub mod signal;
pub mod topology;

use std::path::PathBuf;

pub use num_complex::Complex64;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid sparsity: s = {s} exceeds length m = {m}")]
    InvalidSparsity { s: usize, m: usize },

    #[error("invalid dimension: reduced dimension d = {d} must satisfy 1 <= d <= m = {m}")]
    InvalidDimension { d: usize, m: usize },

    #[error("measurement matrix diverged (largest |entry| = {magnitude:e})")]
    Divergence { magnitude: f64 },

    #[error("invalid quantizer: {0}")]
    InvalidQuantizer(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("empty trace")]
    EmptyTrace,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
