//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Attempted to normalize a zero (or numerically zero) vector.
    #[error("cannot normalize a zero vector")]
    Normalization,

    /// Two vectors or layers with incompatible dimensions met.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Non-finite values where finite ones are required.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An operation was called on an object in the wrong state.
    #[error("invalid state: {0}")]
    State(String),

    /// A caller violated an operation's contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid input data (empty sets, undersized batches, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// No node could be paired with a same-class exemplar.
    #[error("pairing failed: {0}")]
    Pairing(String),

    /// A file did not match its documented format.
    #[error("format error: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Configuration rejected by validation.
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
