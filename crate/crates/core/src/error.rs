use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: model has dimension {expected}, point has length {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input component x[{index}] = {value}")]
    NonFiniteInput { index: usize, value: f64 },

    #[error("non-finite {quantity} evaluated at {point:?}")]
    NonFiniteResult { quantity: &'static str, point: Vec<f64> },

    #[error("the {family} kernel has no closed-form normalizing constant")]
    ConstantUnknown { family: &'static str },

    #[error("the {family} kernel has no closed conditional factorization")]
    NotDecomposable { family: &'static str },

    #[error("eigendecomposition of the Hessian failed at {point:?}")]
    Eigendecomposition { point: Vec<f64> },

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error("chain reached a non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("series too short: need at least {min} values, got {got}")]
    SeriesTooShort { min: usize, got: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("invalid probability {0}; expected a value in (0, 1)")]
    InvalidProbability(f64),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
