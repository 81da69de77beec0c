use std::path::PathBuf;

/// Errors raised across the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index {index} out of range for {what} (limit {limit})")]
    Range {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    /// The dataset does not follow the recording protocol (missing
    /// repetitions, empty partitions, ...).
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("corrupt dataset file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("unsupported manifest format_version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn protocol(msg: impl Into<String>) -> Self {
        Error::Protocol(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
