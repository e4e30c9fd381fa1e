use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("node id {id} out of range for a network of {nodes} nodes")]
    NodeOutOfRange { id: usize, nodes: usize },
    #[error("graph construction failed: {0}")]
    Construction(String),
    #[error("network too large for exhaustive evaluation: {edges} edges (limit {limit})")]
    TooLarge { edges: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
