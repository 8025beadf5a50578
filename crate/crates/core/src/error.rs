use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (table holds {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("measure mismatch: expected {expected}, found {found}")]
    MeasureMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("{op} did not converge: {detail}")]
    NonConvergence { op: &'static str, detail: String },

    #[error("overflow in {0}")]
    Overflow(&'static str),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn no_conv(op: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            op,
            detail: detail.into(),
        }
    }

    /// Name of the failing operation when the error is a convergence failure.
    pub fn operation(&self) -> Option<&'static str> {
        match self {
            Error::NonConvergence { op, .. } => Some(op),
            Error::Overflow(op) => Some(op),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
