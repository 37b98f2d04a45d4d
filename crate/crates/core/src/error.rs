use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u64, right: u64 },

    #[error("input set is empty")]
    EmptySet,

    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: u64, dim: u64 },

    #[error("incompatible sketches: {0}")]
    Incompatible(String),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("numerically ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("malformed binary data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
