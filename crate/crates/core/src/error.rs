use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: JSON error at line {line}, column {column}: {message}")]
    Json {
        context: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid document {doc_id}: {message}")]
    InvalidDoc { doc_id: String, message: String },

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("PGM format error: {0}")]
    Pgm(#[from] crate::raster::pgm::PgmError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("evaluation error: {0}")]
    Eval(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, err: &serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    pub(crate) fn doc(doc_id: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidDoc {
            doc_id: doc_id.into(),
            message: message.into(),
        }
    }
}
