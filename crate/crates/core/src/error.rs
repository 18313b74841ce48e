use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set mismatch: expected p = {expected}, got p = {found}")]
    GroundMismatch { expected: usize, found: usize },

    #[error("{what} supports p <= {max}, got p = {p}")]
    Capability {
        what: &'static str,
        p: usize,
        max: usize,
    },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn capability(what: &'static str, p: usize, max: usize) -> Result<()> {
    if p > max {
        Err(Error::Capability { what, p, max })
    } else {
        Ok(())
    }
}
