use crate::solvers::IterationTrace;

pub type Result<T> = std::result::Result<T, QslrError>;

#[derive(Debug, thiserror::Error)]
pub enum QslrError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("solver diverged at iteration {k}: {reason}")]
    Divergence {
        k: usize,
        reason: String,
        trace: Box<IterationTrace>,
    },
    #[error("i/o error for {path}: {msg}")]
    Io { path: String, msg: String },
}

impl QslrError {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        QslrError::Shape(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        QslrError::Config(msg.into())
    }

    pub(crate) fn io(path: &std::path::Path, msg: impl std::fmt::Display) -> Self {
        QslrError::Io {
            path: path.display().to_string(),
            msg: msg.to_string(),
        }
    }
}
