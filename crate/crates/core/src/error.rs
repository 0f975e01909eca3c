use thiserror::Error;

/// Errors produced by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input failed validation. `index` is 1-based where it refers to a list entry.
    #[error("invalid input at index {index}: {reason}")]
    Validation { index: usize, reason: String },

    #[error("invalid parameter: {0}")]
    Domain(String),

    /// A value left the representable range of binary64.
    #[error("range error in {what}: log-magnitude {log_magnitude:.3e}")]
    Range { what: String, log_magnitude: f64 },

    #[error("tail fit failed: {0}")]
    Fit(String),

    /// Evaluation too close to a zero of the base product for the chosen formula.
    #[error("pole guard ({route}): evaluation point {point} is too close to a zero of f")]
    PoleGuard { route: String, point: String },

    #[error("integration failed at z = {location}: {reason}")]
    Integration { location: String, reason: String },

    #[error("ill-conditioned computation: {0}")]
    Conditioning(String),

    #[error("root solve failed: {0}")]
    Root(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(index: usize, reason: impl Into<String>) -> Self {
        Error::Validation {
            index,
            reason: reason.into(),
        }
    }
}
