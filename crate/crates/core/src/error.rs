use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed input line. Line numbers are 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input is not valid UTF-8: {0}")]
    Encoding(#[from] std::str::Utf8Error),

    /// The pipeline has nothing left to work on (e.g. a relation filter
    /// that matched no triple).
    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    /// An operation was called outside its precondition.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
