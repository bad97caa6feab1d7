use std::path::PathBuf;

use thiserror::Error;

use crate::model::ItemId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no weight for item `{0}`")]
    MissingWeight(ItemId),

    #[error("invalid item token `{0}`")]
    InvalidItem(String),

    #[error("i-extension with `{item}` violates item order in the last itemset")]
    OrderViolation { item: ItemId },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("pattern `{0}` is not stored in the trie")]
    NotFound(String),

    #[error("oracle size guard: {0}")]
    OracleGuard(String),

    #[error("empty database")]
    EmptyDatabase,

    #[error("split exceeds database: {0}")]
    Split(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
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
