use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The depth is at or beyond the one-pixel-disparity limit, so the froxel
    /// has no finite depth extent.
    #[error("depth {depth_mm} mm is at or beyond the disparity limit {limit_mm} mm")]
    InfiniteDepth { depth_mm: f64, limit_mm: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("unsupported option: {0}")]
    Unsupported(String),

    /// Malformed file contents.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
