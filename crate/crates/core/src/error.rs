use thiserror::Error;

/// Errors produced by construction, evaluation and fitting.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or flag-level value violated its domain invariant.
    #[error("invalid value for `{name}`: {value} ({reason})")]
    InvalidValue {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Jump offset outside the open interval (0, delta).
    #[error("jump offset {offset} outside (0, {delta})")]
    OffsetOutOfRange { offset: f64, delta: f64 },

    /// A log-likelihood term became non-finite; reports the interval index.
    #[error("non-finite log-likelihood term at interval {interval}")]
    NonFiniteTerm { interval: usize },

    /// Path has no variation; nothing can be estimated from it.
    #[error("degenerate path: all observed values are identical")]
    DegeneratePath,

    /// A Monte Carlo replication failed; reports the replication index.
    #[error("replication {index} failed: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Too many replications failed to converge to report a meaningful result.
    #[error("{failed} of {total} replications failed to converge (> 5% budget)")]
    TooManyFailures { failed: usize, total: usize },

    /// Test function name not present in the registry.
    #[error("unknown test function `{0}` (expected identity, square, abs or cube)")]
    UnknownTestFunction(String),

    /// Malformed CSV input; line numbers are 1-based and include the header.
    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidValue {
            name,
            value,
            reason,
        }
    }
}
