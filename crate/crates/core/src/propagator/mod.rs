//! Fixed-endpoint kernels K(φ₀, φ₁; T) of the time-sliced action.
//!
//! Quadratic Lagrangians get a closed-form route: the n-fold Fresnel–Gaussian
//! integral collapses to a fluctuation determinant ([`lattice_kernel_exact`]).
//! The quartic coupling has no such collapse, so low slice counts are handled
//! by damped oscillatory quadrature over the interior points
//! ([`lattice_kernel_quadrature`]). On top of both sit kernel composition over
//! an intermediate point ([`compose_kernels`]), the rescaled-quantum-scale
//! kernel ([`dressed_kernel`]), and the regulator residual of the discrete
//! equation of motion ([`ehrenfest_residual`]).

mod compose;
mod contraction;
mod ehrenfest;
mod exact;
mod oracles;
mod quadrature;

pub use compose::{compose_kernels, TimedKernel};
pub use ehrenfest::{ehrenfest_residual, ehrenfest_residual_levels, gradient_scale};
pub use exact::{
    dressed_kernel, fluctuation_determinant_scaled, lattice_kernel_exact,
    literal_prefactor_ratio,
};
pub use oracles::{oracle_free_kernel, oracle_harmonic_kernel};
pub use quadrature::{lattice_kernel_quadrature, lattice_kernel_quadrature_levels};

use crate::error::{Error, Result};
use crate::lattice::{LagrangianSpec, LatticeConfig};
use num_complex::Complex64 as C64;

/// Which prefactor multiplies the n-fold slice integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// (hε′)^{−n/2}: no mass, no 2πi, exponent n/2. Kept inspectable because
    /// it cannot reproduce closed-form kernels; see
    /// [`literal_prefactor_ratio`] for the exact discrepancy factor.
    Literal,
    /// (2πihε′/m)^{−(n+1)/2}: the prefactor under which the free kernel is
    /// independent of the slice count. The default.
    Exact,
}

/// A kernel evaluation problem: the dynamics, the quantum scale h (plays ħ),
/// and the prefactor convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub lagrangian: LagrangianSpec,
    pub h: f64,
    pub normalization: Normalization,
}

impl KernelSpec {
    pub fn new(lagrangian: LagrangianSpec, h: f64, normalization: Normalization) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quantum scale must be positive and finite, got {h}"
            )));
        }
        Ok(Self {
            lagrangian,
            h,
            normalization,
        })
    }

    /// Spec under the default exact normalization.
    pub fn exact(lagrangian: LagrangianSpec, h: f64) -> Result<Self> {
        Self::new(lagrangian, h, Normalization::Exact)
    }
}

/// A computed kernel plus the regulator bookkeeping that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: C64,
    pub config: LatticeConfig,
    /// Weakest damping entering the value; 0 when no regulator was needed.
    pub eta_used: f64,
    /// Whether the value is a damping-ladder extrapolation rather than a
    /// single evaluation.
    pub extrapolated: bool,
}

/// The prefactor multiplying the n-fold slice integral.
pub(crate) fn normalization_prefactor(spec: &KernelSpec, config: &LatticeConfig) -> C64 {
    let eps = config.eps_prime();
    let m = spec.lagrangian.mass();
    match spec.normalization {
        Normalization::Exact => C64::from_polar(
            (m / (2.0 * std::f64::consts::PI * spec.h * eps))
                .sqrt()
                .powi((config.n + 1) as i32),
            -((config.n + 1) as f64) * std::f64::consts::FRAC_PI_4,
        ),
        Normalization::Literal => C64::new((spec.h * eps).sqrt().powi(-(config.n as i32)), 0.0),
    }
}
