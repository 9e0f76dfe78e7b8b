use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or invalid input file. The message names the offending
    /// position using 1-based day/client indices.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A solver or transformation was asked to run outside its regime.
    #[error("{algorithm}: precondition violated: {reason}")]
    Precondition {
        algorithm: &'static str,
        reason: String,
    },

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("ILP too large: {0}")]
    IlpTooLarge(String),

    #[error("ILP assignment violates {0}")]
    IlpViolation(String),

    /// The input to a hardness gadget does not meet the promise of the
    /// source problem.
    #[error("promise violated: {0}")]
    Promise(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn precondition(algorithm: &'static str, reason: impl Into<String>) -> Self {
        Error::Precondition {
            algorithm,
            reason: reason.into(),
        }
    }
}
