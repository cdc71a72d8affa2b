use thiserror::Error;

/// Errors raised by the geometry, inscription, covering and bounds routines.
///
/// Every variant carries the name of the operation that failed so that
/// callers (and the CLI) can report which precondition was violated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{op}: empty input")]
    Empty { op: &'static str },

    #[error("{op}: axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange {
        op: &'static str,
        axis: usize,
        dim: usize,
    },

    #[error("{op}: polytope is degenerate (affine dimension {affine_dim} < {required})")]
    Degenerate {
        op: &'static str,
        affine_dim: usize,
        required: usize,
    },

    #[error("{op}: {reason}")]
    Precondition { op: &'static str, reason: String },

    #[error("{op}: {reason}")]
    NotApplicable { op: &'static str, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the filesystem rather than the input data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
