//! Error type shared by every module in this crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition (non-positive length,
    /// probability outside [0, 1], ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator that the physics requires to be nonzero evaluated to
    /// zero (or close enough to be meaningless).
    #[error("singularity: {0}")]
    Singularity(String),

    /// The dead-time correction was asked to invert a count rate at or past
    /// the detector saturation pole.
    #[error("detector saturation: {0}")]
    Saturation(String),

    /// A sampled grid did not meet the requirements of the operation
    /// (non-uniform spacing, missing coverage, under-resolved feature).
    #[error("grid error: {0}")]
    Grid(String),

    /// An iterative scheme failed to converge or a target value is
    /// unreachable for any input.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A fit or solve had a singular design matrix (duplicate abscissae,
    /// too few usable points).
    #[error("singular fit: {0}")]
    SingularFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
