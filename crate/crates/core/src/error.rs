use thiserror::Error;

pub type Result<T> = std::result::Result<T, QstError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QstError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("site index {site} out of range 1..={n_sites}")]
    InvalidSite { site: usize, n_sites: usize },

    #[error("empty time grid")]
    EmptyTimeGrid,

    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("degenerate dimer pair (E+ = E-): transfer period is infinite")]
    DegeneratePair,

    #[error("no threshold root for p in [{lo}, {hi}]: {reason}")]
    NoRoot { lo: f64, hi: f64, reason: String },

    #[error("integrator step underflow: {0}")]
    StepUnderflow(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("config error: {0}")]
    Config(String),
}

impl QstError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        QstError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QstError::NoConvergence { .. }
                | QstError::DegeneratePair
                | QstError::NoRoot { .. }
                | QstError::StepUnderflow(_)
        )
    }
}
