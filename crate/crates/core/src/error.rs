use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// A numerical routine failed to converge or produced an inconsistent result.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The spike eigenvalue does not exceed the phase-transition point, so no
    /// Gaussian limit exists for the largest eigenvalue.
    #[error(
        "spike eigenvalue t1 = {t1} is not identifiable (critical value 1 + sqrt(c) = {critical}); \
         the largest eigenvalue follows the noise-only law"
    )]
    NotIdentifiable { t1: f64, critical: f64 },

    #[error("finite GUE law of order {0} is not supported (only orders 1 and 2)")]
    UnsupportedOrder(u32),

    /// The requested target is outside what the law can represent numerically.
    #[error("out of range: {0}")]
    Range(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid scenario document: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
