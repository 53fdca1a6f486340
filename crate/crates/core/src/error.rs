use std::io;

use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (last jitter tried: {jitter:e})")]
    NotPositiveDefinite { jitter: f64 },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative variance {0}")]
    NegativeVariance(f64),
    #[error("sampling radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("unknown objective function `{0}`")]
    UnknownFunction(String),
    #[error("gradient has a non-finite component")]
    NonFiniteGradient,
    #[error("gaussian process has no training data")]
    EmptyTrainingSet,
    #[error("gaussian process used before fitting")]
    NotFitted,
    #[error("particle cloud is degenerate; kernel matrix could not be factorized")]
    DegenerateCloud,
    #[error("objective `{0}` has no known global minimum")]
    NoKnownOptimum(String),
    #[error("invalid configuration `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("no data to write")]
    NoData,
    #[error("malformed trajectory file: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigInvalid { field: field.into(), message: message.into() }
    }

    /// Numerical blow-ups that end a run early instead of failing it.
    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::NonFiniteGradient | Error::DegenerateCloud | Error::NotPositiveDefinite { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
