use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: not valid UTF-8", path.display())]
    Encoding { path: PathBuf },

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("context {ctx_id}: token {position} has no head annotation")]
    MissingHead { ctx_id: u32, position: usize },

    #[error("not mappable: {0}")]
    NotMappable(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("graph has {0} nodes, brute-force enumeration is limited to 20")]
    GraphTooLarge(usize),

    #[error("singular value decomposition failed on a {rows}x{cols} matrix")]
    Numerical { rows: usize, cols: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid resource: {0}")]
    Resource(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}
