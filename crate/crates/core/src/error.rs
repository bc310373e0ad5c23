use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("parse error on line {line}: unexpected `{token}`")]
    Parse { line: usize, token: String },

    #[error("dataset contains no points")]
    EmptyDataset,

    #[error("matrix needs {required} bytes but the memory cap is {cap} bytes")]
    CapacityExceeded { required: u64, cap: u64 },

    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("labelings differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParams {
            field,
            reason: reason.into(),
        }
    }
}
