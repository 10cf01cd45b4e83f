//! Crate-wide error type.

use std::path::PathBuf;

use crate::pair::PairState;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter was outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The open set is empty. This is the natural end of the process, not a
    /// fault; callers that run to termination match on it.
    #[error("process terminated: no open pair remains")]
    Terminated,

    /// An edge insertion was requested for a pair that is not open.
    #[error("invalid transition: pair {{{u}, {v}}} is {state:?}, not open")]
    InvalidTransition { u: u32, v: u32, state: PairState },

    /// The trajectory left its domain (q = q0 + q1 must stay positive).
    #[error("singular trajectory state at t = {t}: q = {q}")]
    Singularity { t: f64, q: f64 },

    /// An input value, file, or dataset failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two datasets that must share a t-grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An I/O failure, annotated with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
