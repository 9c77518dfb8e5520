use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("system is inconsistent (least-squares residual {residual:.3e})")]
    Inconsistent { residual: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("no closed form for E[Z] under this distribution; use a Monte-Carlo estimate")]
    UnsupportedClosedForm,

    #[error("this method requires the identity geometry (B = I)")]
    UnsupportedGeometry,

    #[error("momentum parameter beta = {beta} is inadmissible (a1 + a2 = {sum:.6} >= 1); admissible range is beta < {bound:.6e}")]
    Inadmissible { beta: f64, sum: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> CoreError {
    CoreError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
