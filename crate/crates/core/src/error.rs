//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad shapes, out-of-range parameters).
    #[error("configuration error: {0}")]
    Config(String),
    /// Invalid argument to an operation (out-of-range channel, bad index).
    #[error("argument error: {0}")]
    Argument(String),
    /// Operation called in a state that does not permit it.
    #[error("usage error: {0}")]
    Usage(String),
    /// Training produced non-finite numbers.
    #[error("training error: {0}")]
    Training(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    /// Malformed artifact file (dataset, checkpoint).
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
