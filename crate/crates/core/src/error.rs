//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible vector/matrix shapes.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Input violates an operation's domain (wrong task kind, empty block, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration detected before any work starts.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed input data, with its location in the source file.
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
