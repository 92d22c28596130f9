//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by validation, parsing, and the numerical pipeline.
#[derive(Debug, Error)]
pub enum HolonomyError {
    /// A matrix or frame failed a structural check (shape, Hermiticity,
    /// unitarity, finiteness, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Input matrix is singular or rank-deficient where full rank is required.
    #[error("singular input: {0}")]
    Singular(String),

    /// A time argument fell outside the scenario domain [0, T].
    #[error("domain error: {0}")]
    Domain(String),

    /// Scenario document could not be parsed; the message carries the path
    /// to the offending field.
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    /// An operation's precondition was not met (non-cyclic trajectory,
    /// frame mismatch, wrong rank, ...).
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// A gate design is arithmetically infeasible for the requested (N, m).
    #[error("infeasible design: {0}")]
    Infeasible(String),

    /// Instantaneous eigenvalue tracking became ambiguous (level crossing).
    #[error("eigenvalue tracking error: {0}")]
    Tracking(String),

    /// Two objects that must share a time grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// File I/O failure in the CLI layer.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HolonomyError>;
