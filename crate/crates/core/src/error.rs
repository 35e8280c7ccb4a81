use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("line {line}: expected 33 landmarks, found {found}")]
    LandmarkCount { line: usize, found: usize },

    #[error("line {line}: timestamp {ts} ms does not increase for camera {camera}")]
    NonMonotoneTimestamp { line: usize, camera: String, ts: f64 },

    #[error("need at least {needed} items, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid calibration for camera {camera}: {msg}")]
    Calibration { camera: String, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
