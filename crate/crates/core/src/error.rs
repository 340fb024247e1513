//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, KltError>;

#[derive(Debug, Error)]
pub enum KltError {
    /// Parameter validation failed (wrong exponent range, bad grid, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// File could not be read or written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// File was read but its contents do not match the expected format.
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    /// An iterative eigensolve hit its iteration limit.
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The variational optimizer hit its iteration limit. The best state
    /// reached so far is attached for diagnostics.
    #[error("optimizer did not converge after {iterations} iterations (stationarity {residual:.3e})")]
    OptimizerNonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<crate::variational::GnsState>,
    },

    /// A root bracket could not be established; the sampled values are
    /// attached so the caller can see what the function looked like.
    #[error("bracketing failed: {msg}")]
    Bracket { msg: String, samples: Vec<(f64, f64)> },

    /// A detector that must be monotone across a bracket was not.
    #[error("inconclusive search: {msg}")]
    Inconclusive { msg: String, samples: Vec<(f64, f64)> },

    /// Formula evaluated at a parameter point where it is singular.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// Input outside the operation's domain (e.g. a pressure function of a
    /// potential that vanishes inside the evaluation window).
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested dense grid exceeds the memory guard.
    #[error("grid too large: {cells} cells exceeds limit {limit}")]
    MemoryGuard { cells: usize, limit: usize },
}

impl KltError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        KltError::InvalidParams(msg.into())
    }
}
