use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("rejected parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported problem: {0}")]
    Unsupported(String),

    #[error("grid too large: {points} lattice points exceeds the limit of {limit}; {hint}")]
    GridTooLarge {
        points: usize,
        limit: usize,
        hint: String,
    },

    #[error("solver failure in window ({tau1}, {tau2}): {reason}")]
    SolverFailure {
        tau1: usize,
        tau2: usize,
        reason: String,
    },

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("non-causal access: {0}")]
    NonCausal(String),

    #[error("protocol violation at t={t}: {reason}")]
    ProtocolViolation { t: usize, reason: String },

    #[error("projection failed on body {index}: {reason}")]
    ProjectionFailure { index: usize, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
