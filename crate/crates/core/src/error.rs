use thiserror::Error;

use crate::polygon::ValidationVerdict;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid control polygon: {0}")]
    Validation(ValidationVerdict),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The projection direction is not generic for the polygon.
    #[error("degenerate projection at segments {first} and {second}: {reason}")]
    DegenerateProjection {
        first: usize,
        second: usize,
        reason: String,
    },

    #[error("operation cancelled")]
    Cancelled,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
