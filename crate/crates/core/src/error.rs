//! Error classes shared by every module in the crate.
//!
//! Each variant corresponds to one failure mode of the numerical pipeline;
//! no operation panics on bad input, and no NaN/Inf escapes a public
//! operation without being converted into one of these.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An integrand evaluation produced NaN or Inf.
    #[error("non-finite integrand value near x = {x}")]
    NonFiniteIntegrand { x: f64 },

    /// The resolution demanded by the phase-sampling rule exceeds the caller's budget.
    #[error("quadrature needs {required} intervals but the step budget is {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    /// A critical point with |f''| below the degeneracy threshold was found.
    #[error("degenerate critical point at x = {location} (|f''| = {curvature:e})")]
    DegenerateCriticalPoint { location: f64, curvature: f64 },

    /// The halved form needs exactly one critical point in the window.
    #[error("expected exactly one critical point in the window, found {count}")]
    MultipleCriticalPoints { count: usize },

    /// Extrapolation needs at least two ladder entries.
    #[error("extrapolation ladder has {len} entries; at least 2 are required")]
    LadderTooShort { len: usize },

    /// Ladder parameters must halve from one level to the next (within 1%).
    #[error("ladder parameters must halve: ratio {ratio} at step {index}")]
    RatioViolation { index: usize, ratio: f64 },

    /// Convergence-order estimation is undefined when an error vanishes.
    #[error("zero error against the reference at ladder index {index}")]
    ZeroError { index: usize },

    /// Newton iteration failed to reach the gradient tolerance.
    #[error("Newton iteration diverged after {iterations} steps (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    /// Harmonic configuration at or past a focal point of the classical flow.
    #[error("focal configuration: omega*T at or past a focal point (sin(omega*T) = {sin_omega_t:e})")]
    FocalPoint { sin_omega_t: f64 },

    /// Closed-form kernels exist only for quadratic Lagrangians.
    #[error("operation supports only quadratic lagrangians, got {kind}")]
    UnsupportedLagrangian { kind: &'static str },

    /// Direct multi-dimensional quadrature is capped at a small interior count.
    #[error("direct quadrature supports n <= {max}, got n = {n}")]
    DimensionTooLarge { n: usize, max: usize },

    /// A domain-type invariant was violated at construction.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable short code used by the CLI for failed sweep rows and diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFiniteIntegrand { .. } => "non_finite_integrand",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::DegenerateCriticalPoint { .. } => "degenerate_critical_point",
            Error::MultipleCriticalPoints { .. } => "multiple_critical_points",
            Error::LadderTooShort { .. } => "ladder_too_short",
            Error::RatioViolation { .. } => "ratio_violation",
            Error::ZeroError { .. } => "zero_error",
            Error::NewtonDivergence { .. } => "newton_divergence",
            Error::FocalPoint { .. } => "focal_point",
            Error::UnsupportedLagrangian { .. } => "unsupported_lagrangian",
            Error::DimensionTooLarge { .. } => "dimension_too_large",
            Error::InvalidParameter(_) => "invalid_parameter",
        }
    }
}
