use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph loading, scoring, and search operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Malformed {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex {id} out of range (graph has {n} vertices)")]
    VertexOutOfRange { id: u32, n: usize },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("attribute matrix required but not loaded")]
    MissingAttributes,

    #[error("p-values required but not calibrated")]
    MissingPValues,

    #[error("{0}")]
    InvalidInput(String),

    #[error("instance too large: {0}")]
    TooLarge(String),
}

impl Error {
    /// True for errors that should map to the resource-limit exit code
    /// rather than the generic input-error code.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::TooLarge(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
