use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scale order must be an even integer >= 2, got {0}")]
    InvalidOrder(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order mismatch: {what} was built for N = {found}, expected N = {expected}")]
    OrderMismatch {
        what: &'static str,
        expected: u32,
        found: u32,
    },

    #[error("moment order {requested} exceeds table maximum {available}")]
    MomentOrder { requested: usize, available: usize },

    #[error("refinement system has a {dim}-dimensional null space (expected 1)")]
    NullSpace { dim: usize },

    #[error("moment system for m = {m} is singular (condition estimate {condition:.3e})")]
    SingularMoments { m: usize, condition: f64 },

    #[error("Gram matrix is not positive definite: pivot {index} = {pivot:e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("oracle certification failed: {0}")]
    Certification(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("table bundle {path}: {reason}")]
    Integrity { path: PathBuf, reason: String },

    #[error("table bundle {path}: unsupported format version {found}")]
    Version { path: PathBuf, found: String },

    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidOrder(_)
                | Error::InvalidArgument(_)
                | Error::OrderMismatch { .. }
                | Error::MomentOrder { .. }
                | Error::GridMismatch(_)
                | Error::MissingFile(_)
        )
    }
}
