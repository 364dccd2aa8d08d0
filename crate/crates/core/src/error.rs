use std::path::PathBuf;

use crate::volume::Dims;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing sidecar header {0}")]
    MissingSidecar(PathBuf),

    #[error("garbled sidecar header {path}: {reason}")]
    BadSidecar { path: PathBuf, reason: String },

    #[error("invalid volume header: {0}")]
    InvalidHeader(String),

    #[error("payload length mismatch: expected {expected} values, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value in payload at element {index}")]
    NonFinite { index: usize },

    #[error("wrong volume kind: expected {expected}, found {found}")]
    WrongKind {
        expected: &'static str,
        found: String,
    },

    #[error("dimension mismatch: expected {expected}, found {actual}")]
    DimMismatch { expected: Dims, actual: Dims },

    #[error("channel mismatch: expected {expected}, found {actual}")]
    ChannelMismatch { expected: usize, actual: usize },

    #[error("volume {dims} too small: need at least {min} voxels per axis")]
    VolumeTooSmall { dims: Dims, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("memory budget of {budget} bytes is below one cost map ({required} bytes)")]
    BudgetTooSmall { budget: u64, required: u64 },

    #[error("no structures left to score after skipping labels absent from both volumes")]
    EmptyLabelList,

    #[error("no pair means to aggregate")]
    EmptyPairList,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
