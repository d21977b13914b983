//! Error type for corpus IO, persistence, and the experiment harness.

use std::path::PathBuf;

/// Everything that can go wrong outside the pure core: file IO, format
/// violations, and missing upstream artifacts.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Core(#[from] sic_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest {} row {row}: {message}", path.display())]
    Manifest {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("wav {}: {message}", path.display())]
    Wav { path: PathBuf, message: String },

    #[error("annotation {} line {line}: {message}", path.display())]
    Annotation {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("document {}: {message}", path.display())]
    Document { path: PathBuf, message: String },

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
