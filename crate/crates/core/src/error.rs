//! Error types shared across the pipeline.

use thiserror::Error;

/// Errors produced anywhere in the extraction/training/evaluation pipeline.
///
/// The variants are grouped the way the CLI maps them to exit codes:
/// configuration mistakes, bad input data, and numeric failures.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Caller misconfiguration: bad hop window, empty training split, etc.
    #[error("config error: {0}")]
    Config(String),

    /// Lexical error in a Java source file, with a byte offset.
    #[error("lex error at byte {offset}: {message}")]
    Lex { offset: usize, message: String },

    /// Syntax outside the supported Java subset.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A graph query was handed an id that does not exist.
    #[error("graph error: {0}")]
    Graph(String),

    /// Malformed data file (interchange graph, sample line, checkpoint, vocabulary).
    #[error("data error: {0}")]
    Data(String),

    /// Non-finite value encountered during propagation or gradient computation.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CoreError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
