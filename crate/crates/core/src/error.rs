//! Error type shared by all modules.

use crate::paraxial::ModeIndex;

/// Errors surfaced by the numerical routines.
///
/// Pure evaluation failures (poles, overflow, invalid parameters) are kept
/// distinct from convergence failures so callers can tell a misuse from a
/// quadrature or truncation budget that is too small.
#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    /// Gamma evaluated at a non-positive integer.
    #[error("gamma pole at x = {0}")]
    GammaPole(f64),

    /// Gamma argument too large for f64.
    #[error("gamma overflow at x = {0}")]
    GammaOverflow(f64),

    /// A Pochhammer denominator parameter hit a non-positive integer inside
    /// the summation range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Rational ladder power would land between Fock levels.
    #[error("ladder target {target} is not a nonnegative integer (n = {n}, beta - alpha = {shift})")]
    NonIntegralTarget { n: u32, shift: f64, target: f64 },

    /// Operator series tail estimate exceeded the requested tolerance.
    #[error("truncation overflow: tail estimate {tail:.3e} exceeds tolerance {tol:.3e}")]
    TruncationOverflow { tail: f64, tol: f64 },

    /// Node doubling still moved the quadrature result by more than the target.
    #[error("quadrature not converged: node doubling moved result by {delta:.3e} (target {target:.3e})")]
    NotConverged { delta: f64, target: f64 },

    /// Field magnitude vanished along a circulation loop.
    #[error("degenerate loop: |field| fell below {threshold:.3e} at radius {radius:.3e}")]
    DegenerateLoop { radius: f64, threshold: f64 },

    /// Decomposition indices disagree between two tables being compared.
    #[error("incompatible decompositions: {0}")]
    Incompatible(String),

    /// A coefficient table or grid referenced a mode outside the truncated set.
    #[error("mode {0:?} outside truncation")]
    ModeOutOfRange(ModeIndex),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
