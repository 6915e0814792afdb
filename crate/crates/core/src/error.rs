use thiserror::Error;

/// Errors raised by front construction, statistics and pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation precondition (shape, finiteness, range).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A vector lies outside the region where the operation is defined,
    /// typically because it does not strongly dominate the reference vector.
    #[error("domain error: {0}")]
    Domain(String),
    /// Not enough samples to compute the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// The request is valid but outside what this implementation supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    /// Input data could be read but is malformed or empty.
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
