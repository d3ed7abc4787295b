use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported instance format: {0}")]
    UnsupportedFormat(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator error: {0}")]
    Operator(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("unknown test case `{0}`")]
    UnknownTestCase(String),

    #[error("instance `{name}` not found (looked for {path})")]
    MissingInstance { name: String, path: PathBuf },

    #[error("corrupt run record {path}: {message}")]
    CorruptRecord { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
