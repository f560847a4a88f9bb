use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = ScootError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ScootError {
    /// A parameter or input violated an operation precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Every score in a list shares one rank, so rank correlation is undefined.
    #[error("degenerate ranking: all {0} scores are tied")]
    DegenerateRanking(usize),

    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("cannot decode image {}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("parse error in {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("validation error in {}: {message}", path.display())]
    Validation { path: PathBuf, message: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ScootError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ScootError::InvalidParameter(msg.into())
    }

    /// True for errors caused by configuration or arguments rather than input data.
    pub fn is_config_error(&self) -> bool {
        matches!(self, ScootError::InvalidParameter(_))
    }
}
