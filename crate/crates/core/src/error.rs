//! Error type shared by all modules.

use thiserror::Error;

/// Errors reported by state construction, preparation, and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QeError {
    /// A filtered state lost essentially all of its norm; there is nothing
    /// left to renormalize.
    #[error("state was fully absorbed by the filter (norm {norm:.3e} below 1e-14)")]
    ZeroNorm { norm: f64 },

    /// A matrix expected to be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    /// An argument fell outside its documented range.
    #[error("invalid `{field}`: {message}")]
    DomainError {
        field: &'static str,
        message: String,
    },

    /// One of the two path branches carries no probability, so quantities
    /// conditioned on both branches are undefined.
    #[error("conditional branch weight {weight:.3e} is below 1e-12; overlap undefined")]
    DegenerateBranch { weight: f64 },

    /// No probe rotation brings the requested amplitude to zero.
    #[error("no probe angle zeroes the cross amplitude (best residual {residual:.3e})")]
    NotFound { residual: f64 },

    /// A set of probabilities does not sum to one.
    #[error("probabilities sum to {sum} instead of 1")]
    NotNormalized { sum: f64 },

    /// Too few events to estimate anything meaningful.
    #[error("insufficient counts: {total} events (need at least 100)")]
    InsufficientCounts { total: u64 },
}

pub type Result<T> = core::result::Result<T, QeError>;
