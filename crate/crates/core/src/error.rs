//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the fallible operations of this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction with unsupported dimensions.
    #[error("grid dimensions must be even and at least 4, got {nx}x{ny}")]
    BadGrid { nx: usize, ny: usize },
    /// Two values disagree on grid shape or boundary.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// A mathematical precondition of an operation is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An implicit solve did not converge.
    #[error("solver failure: {0}")]
    SolverFailure(String),
    /// Invalid run or experiment configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// File output failure in the harness.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
