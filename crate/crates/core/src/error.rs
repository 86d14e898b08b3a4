use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    Capacity {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("graph is not strongly regular: vertices {0} and {1} violate the parameter count")]
    NotStronglyRegular(usize, usize),

    #[error("integer overflow while evaluating {0}")]
    Overflow(String),

    #[error("no candidate wiring reproduces the target identity: {0}")]
    Calibration(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            needed,
            limit,
        }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. } | Error::Overflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
