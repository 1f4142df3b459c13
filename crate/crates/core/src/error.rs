use thiserror::Error;

#[derive(Debug, Error)]
pub enum QfracError {
    #[error("a path needs at least one entry")]
    EmptyPath,

    #[error("conductor must be a positive rational, got {0}")]
    NonPositiveConductor(String),

    #[error("{0} is not a proper path for q = {1}")]
    NotProperPath(String, String),

    #[error("c(q, m) = {0} differs from c(q, n) = {1}")]
    ValueMismatch(String, String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scaled entry {0} is not an integer")]
    NonIntegralScaling(String),

    #[error("congruence fails at index {index}: {detail}")]
    CongruenceFailed { index: usize, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QfracError>;
