use alloc::string::String;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A matrix that must be inverted is singular (or numerically so).
    #[error("singular matrix: {0}")]
    Singular(String),

    /// The eigenvector basis is too ill-conditioned for the spectral fast path.
    #[error("ill-conditioned eigenbasis: condition {condition:e} exceeds ceiling {ceiling:e}")]
    IllConditioned { condition: f64, ceiling: f64 },

    /// A series, continued fraction or quadrature rule did not settle.
    #[error("convergence failure in {context}: {detail}")]
    Convergence { context: String, detail: String },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn singular(msg: impl Into<String>) -> Self {
        Error::Singular(msg.into())
    }

    pub(crate) fn convergence(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Convergence {
            context: context.into(),
            detail: detail.into(),
        }
    }

    /// True for failures that stem from the inputs rather than from the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Singular(_) | Error::IllConditioned { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
