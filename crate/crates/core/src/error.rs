use thiserror::Error;

/// Errors produced anywhere in the segmentation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("truncated PGM payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("unsupported PGM maxval {0} (must be at most 255)")]
    UnsupportedMaxval(u32),
    #[error("label {0} does not fit in a 16-bit PGM")]
    LabelOverflow(u32),
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid object list: {0}")]
    InvalidReport(String),
    #[error("invalid configuration: {field} {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
