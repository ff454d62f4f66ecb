use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the filtering, ingestion and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("non-finite value produced by {context} at state {state:?}")]
    NonFinite { context: &'static str, state: Vec<f64> },

    #[error("singular or ill-conditioned matrix in {0}")]
    Singular(&'static str),

    #[error("timestamps must be strictly increasing (sample {index}: {prev} then {next})")]
    NonMonotonic { index: usize, prev: f64, next: f64 },

    #[error("filter step {index} failed: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    /// True for failures caused by bad input or configuration, as opposed to
    /// numeric breakdown inside the filter.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::InvalidConfig(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::NonMonotonic { .. }
            | Error::InsufficientData(_)
            | Error::Dimension { .. } => true,
            Error::Step { source, .. } => source.is_input_error(),
            Error::NonFinite { .. } | Error::Singular(_) => false,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
