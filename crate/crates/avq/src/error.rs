use std::path::PathBuf;

use thiserror::Error;

use crate::manifest::ManifestError;
use crate::model_file::ModelFileError;

/// Failure of a CLI workflow, tagged with the pipeline stage it came from.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] avq_core::Error),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    ModelFile(#[from] ModelFileError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Table { path: PathBuf, message: String },
    #[error("{0}")]
    Config(String),
    #[error("clip {id}: {source}")]
    Clip {
        id: String,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_clip(id: &str, err: impl Into<CliError>) -> Self {
        Self::Clip {
            id: id.to_string(),
            source: Box::new(err.into()),
        }
    }

    /// Name of the pipeline stage reported in diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Self::Core(avq_core::Error::Fold { source, .. }) => source.module(),
            Self::Core(e) => e.module(),
            Self::Manifest(_) => "media-io",
            Self::ModelFile(_) => "neural",
            Self::Io { .. } | Self::Table { .. } | Self::Config(_) => "cli",
            Self::Clip { source, .. } => source.module(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
