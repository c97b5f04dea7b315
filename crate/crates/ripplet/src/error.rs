use thiserror::Error;

/// Errors produced by the construction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain (`n < 2`, `mu <= 1`, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested grid resolution cannot represent the requested operation.
    #[error("resolution too coarse: {0}")]
    Resolution(String),

    /// An index range or matrix shape does not match what the operation needs.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A linear system turned out rank deficient.
    #[error("singular system: {0}")]
    Singular(String),

    /// The dual-filter system has no solution for the given support.
    #[error("no dual filter solution (identity residual {residual:.3e})")]
    NoSolution { residual: f64 },

    /// An iteration did not reach its tolerance within the allowed depth.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    IterationLimit { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
