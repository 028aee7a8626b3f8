use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The first group are precondition failures (bad user input); the second
/// group are numerical failures (an iteration or truncation that could not
/// be brought within tolerance).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rule mismatch: {0}")]
    RuleMismatch(String),

    #[error("threshold violated: p*t = {pt} but 2*s = {two_s}")]
    ThresholdViolated { pt: f64, two_s: f64 },

    #[error("iteration did not converge after {iterations} steps (last change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64 },

    #[error("truncation failure: {0}")]
    Truncation(String),

    #[error("adjoint image not integrable: s - q(s - t) = {margin} <= 0")]
    NotIntegrable { margin: f64 },

    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::DimensionMismatch { .. }
                | Error::RuleMismatch(_)
                | Error::ThresholdViolated { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    ensure(value.is_finite() && value > 0.0, || {
        format!("{name} must be a positive finite number, got {value}")
    })
}
