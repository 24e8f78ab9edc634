//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or evaluating means.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: dimensions, weights, descriptor strings, file syntax.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix failed a structural requirement (Hermitian, positive definite, ...).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// A scalar function was asked for a value outside its usable range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A candidate representing function failed validation.
    #[error("not a valid representing function: {0}")]
    InvalidMean(String),

    /// An iteration failed to meet its tolerance within its budget.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A matrix fixed-point solver ran out of iterations. Carries the partial
    /// diagnostics and the last iterate so callers (notably the CLI) can
    /// still report what happened before signaling failure.
    #[error("solver did not converge: {message}")]
    SolverStalled {
        message: String,
        report: Box<crate::solver::SolveReport>,
        last_iterate: Box<crate::hpd::PdMatrix>,
    },

    /// A numerical routine produced an unusable result (overflow, NaN, lost bracket).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// I/O problems while reading or writing matrix files or reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
