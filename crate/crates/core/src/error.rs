use thiserror::Error;

/// Errors raised by the simulation and numerics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An index or horizon went past the available data.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A parameter lies outside the range where a theory law is stated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at a kernel singularity.
    #[error("singular evaluation: {0}")]
    Singularity(String),

    /// A problem size exceeded its configured budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An iterative method did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    /// Malformed input text (K-set files, config files).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
