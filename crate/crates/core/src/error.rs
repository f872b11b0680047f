use thiserror::Error;

/// Errors raised by the calculus engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical precondition of a branch-cut or inversion routine failed.
    #[error("domain error: {message}")]
    Domain {
        message: String,
        /// Diagnostic value attached to the failure (min eigenvalue, condition number, best epsilon...).
        diagnostic: Option<f64>,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>, diagnostic: f64) -> Self {
        Error::Domain {
            message: msg.into(),
            diagnostic: Some(diagnostic),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
