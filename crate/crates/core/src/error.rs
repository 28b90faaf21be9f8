use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Rejection sampling could not place entities under the separation
    /// constraints.
    #[error("deployment generation failed: {0}")]
    Generation(String),

    /// An operation was invoked outside its contract (wrong state, bad
    /// argument ranges).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A document failed structural validation after parsing.
    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    /// Raw parse failure with position diagnostics.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Numerical training failure (NaN/Inf loss or gradient).
    #[error("training diverged at step {step}: {message}")]
    Training { step: usize, message: String },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
