//! Shared numerical kernel: oscillatory quadrature with Gaussian damping,
//! tridiagonal determinants, critical-point location, and Richardson
//! extrapolation ladders.
//!
//! Every operation here is pure: identical inputs produce bit-identical
//! outputs, and callers may evaluate from many threads at once.

mod quadrature;
mod richardson;
mod roots;
mod tridiagonal;

pub use quadrature::{damped_quadrature, DampedOscillatoryIntegrand};
pub use richardson::{estimate_convergence_order, richardson_extrapolate, ExtrapolationLadder};
pub use roots::{find_critical_points, CriticalPoint};
pub use tridiagonal::{tridiagonal_determinant, tridiagonal_solve};

pub(crate) use tridiagonal::minor_recursion;

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// One damped evaluation per η level plus the η → 0 extrapolation, so
/// callers can inspect the ladder the final value came from.
#[derive(Debug, Clone)]
pub struct DampedLevels {
    pub etas: Vec<f64>,
    pub values: Vec<C64>,
    pub extrapolated: C64,
}

/// Extrapolate a damping ladder to its limit; a single level is returned
/// as-is. Damped values depend on η to first order, so the ladder is
/// eliminated starting at order 1.
pub fn extrapolate_levels(etas: &[f64], values: &[C64]) -> Result<C64> {
    if values.len() == 1 {
        return Ok(values[0]);
    }
    let ladder = ExtrapolationLadder::new(etas.to_vec(), values.to_vec())?;
    richardson_extrapolate(&ladder, 1)
}

/// Damping ladder specification: either derived from the problem geometry or
/// given explicitly (strictly halving, largest first).
#[derive(Debug, Clone, PartialEq)]
pub enum EtaLadder {
    /// Derive the base damping from the integrand geometry; `levels` entries.
    Auto { levels: usize },
    /// Explicit damping values, strictly decreasing by halves, largest first.
    Explicit(Vec<f64>),
}

impl EtaLadder {
    /// Number of ladder levels.
    pub fn levels(&self) -> usize {
        match self {
            EtaLadder::Auto { levels } => *levels,
            EtaLadder::Explicit(v) => v.len(),
        }
    }

    /// Materialize the ladder given the smallest damping an Auto ladder
    /// should reach. Explicit ladders are returned as-is (validated).
    pub fn resolve(&self, auto_eta_min: f64) -> Result<Vec<f64>> {
        let values = match self {
            EtaLadder::Auto { levels } => {
                if *levels < 2 {
                    return Err(Error::LadderTooShort { len: *levels });
                }
                if !(auto_eta_min.is_finite() && auto_eta_min > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "auto damping floor must be positive and finite, got {auto_eta_min}"
                    )));
                }
                // Largest first so the ladder parameters strictly decrease.
                (0..*levels)
                    .map(|k| auto_eta_min * f64::from(1u32 << (levels - 1 - k)))
                    .collect()
            }
            EtaLadder::Explicit(v) => v.clone(),
        };
        validate_halving(&values)?;
        Ok(values)
    }
}

/// Regularization controls shared by the oscillatory-integral operations:
/// damping ladder and the per-axis quadrature budget.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationParams {
    pub eta: EtaLadder,
    /// Cap on composite-quadrature intervals per integration axis.
    pub step_budget: usize,
}

impl Default for RegularizationParams {
    fn default() -> Self {
        RegularizationParams {
            eta: EtaLadder::Auto { levels: 5 },
            step_budget: 1 << 18,
        }
    }
}

impl RegularizationParams {
    pub fn with_levels(levels: usize) -> Self {
        RegularizationParams {
            eta: EtaLadder::Auto { levels },
            ..Self::default()
        }
    }
}

/// Check that a parameter sequence is strictly decreasing with each entry
/// half its predecessor within 1%.
pub(crate) fn validate_halving(params: &[f64]) -> Result<()> {
    if params.len() < 2 {
        return Err(Error::LadderTooShort { len: params.len() });
    }
    for (i, w) in params.windows(2).enumerate() {
        if !(w[0].is_finite() && w[1].is_finite() && w[0] > 0.0 && w[1] > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ladder parameters must be positive and finite, got {} -> {}",
                w[0], w[1]
            )));
        }
        let ratio = w[1] / w[0];
        if !(0.495..=0.505).contains(&ratio) {
            return Err(Error::RatioViolation { index: i, ratio });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_ladder_resolves_to_halving_sequence() {
        let ladder = EtaLadder::Auto { levels: 4 }.resolve(0.25).unwrap();
        assert_eq!(ladder, vec![2.0, 1.0, 0.5, 0.25]);
    }

    #[test]
    fn explicit_ladder_must_halve() {
        let err = EtaLadder::Explicit(vec![1.0, 0.7]).resolve(1.0).unwrap_err();
        assert!(matches!(err, Error::RatioViolation { index: 0, .. }));
        assert!(EtaLadder::Explicit(vec![1.0, 0.5, 0.25]).resolve(1.0).is_ok());
    }

    #[test]
    fn short_ladders_are_rejected() {
        assert!(matches!(
            EtaLadder::Auto { levels: 1 }.resolve(1.0).unwrap_err(),
            Error::LadderTooShort { len: 1 }
        ));
        assert!(matches!(
            EtaLadder::Explicit(vec![1.0]).resolve(1.0).unwrap_err(),
            Error::LadderTooShort { len: 1 }
        ));
    }
}
