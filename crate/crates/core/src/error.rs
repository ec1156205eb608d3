use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading or writing a network checkpoint.
#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("malformed checkpoint header: {0}")]
    MalformedHeader(String),
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("checkpoint shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("truncated checkpoint payload: expected {expected} parameter bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum PinnError {
    /// An input lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),
    /// A quotient whose denominator vanishes, or nearly so.
    #[error("singularity: {0}")]
    Singularity(String),
    /// The caller violated an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),
    /// A configuration value failed validation.
    #[error("invalid configuration `{key}`: {message}")]
    Config { key: String, message: String },
    /// A loss, gradient, or residual became non-finite.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl PinnError {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        PinnError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PinnError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = PinnError> = std::result::Result<T, E>;
