use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("not a path: missing edge {0} -> {1}")]
    NotAPath(usize, usize),
    #[error("negative cycle detected")]
    NegativeCycle,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown edge {0} -> {1}")]
    UnknownEdge(usize, usize),
    #[error("no path from {0} to {1}")]
    NoPath(usize, usize),
    #[error("nodes lie in different components ({0} and {1})")]
    DifferentCsm(usize, usize),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("no fixpoint after {0} iterations")]
    NonTermination(usize),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
