//! The regulator residual of the discrete equation of motion: the damped
//! expectation ⟨∂S_n/∂x_site⟩ under the oscillatory weight e^{iS_n/h}.
//!
//! Integrating the total derivative ∂/∂x_site[e^{−η(x−c)²}·e^{iS_n/h}] shows
//! the expectation equals −2iηh·⟨x_site − c_site⟩: a pure damping artifact,
//! O(η), vanishing as the regulator is removed. The η-ladder extrapolation
//! is the numerical form of that removal.

use super::contraction::SliceEngine;
use super::KernelSpec;
use crate::error::{Error, Result};
use crate::numerics::{extrapolate_levels, DampedLevels, RegularizationParams};
use crate::lattice::LatticeConfig;
use num_complex::Complex64 as C64;

const MAX_INTERIOR: usize = 3;

/// The residual at every damping level plus the η → 0 extrapolation.
/// `site` is 1-based over the interior points.
pub fn ehrenfest_residual_levels(
    spec: &KernelSpec,
    config: LatticeConfig,
    site: usize,
    reg: &RegularizationParams,
) -> Result<DampedLevels> {
    if config.n > MAX_INTERIOR {
        return Err(Error::DimensionTooLarge {
            n: config.n,
            max: MAX_INTERIOR,
        });
    }
    if site == 0 || site > config.n {
        return Err(Error::InvalidParameter(format!(
            "site must lie in 1..={}, got {site}",
            config.n
        )));
    }
    let engine = SliceEngine::new(&spec.lagrangian, config, spec.h, reg)?;
    let eps = config.eps_prime();
    let m = spec.lagrangian.mass();
    let lagrangian = spec.lagrangian;
    let identity = |x: f64| x;
    let slope = move |x: f64| lagrangian.potential_slope(x);

    let etas = engine.etas().to_vec();
    let mut values = Vec::with_capacity(etas.len());
    for &eta in &etas {
        let weight = engine.contract(eta, None)?;
        let center = engine.contract(eta, Some((site, &identity)))?;
        // Neighbor moments: interior sites come from their own insertion,
        // boundary neighbors are constants times the plain weight.
        let left = if site == 1 {
            config.phi0 * weight
        } else {
            engine.contract(eta, Some((site - 1, &identity)))?
        };
        let right = if site == config.n {
            config.phi1 * weight
        } else {
            engine.contract(eta, Some((site + 1, &identity)))?
        };
        let potential = engine.contract(eta, Some((site, &slope)))?;
        // ⟨∂S/∂x_site⟩ = (m/ε′)·(2⟨x⟩ − ⟨x₋⟩ − ⟨x₊⟩) − ε′·⟨V′(x)⟩, then
        // normalized by ⟨1⟩.
        let numerator = (center * 2.0 - left - right) * (m / eps) - potential * eps;
        values.push(numerator / weight);
    }
    let extrapolated = extrapolate_levels(&etas, &values)?;
    Ok(DampedLevels {
        etas,
        values,
        extrapolated,
    })
}

/// The η-extrapolated residual ⟨∂S_n/∂x_site⟩/⟨1⟩.
pub fn ehrenfest_residual(
    spec: &KernelSpec,
    config: LatticeConfig,
    site: usize,
    reg: &RegularizationParams,
) -> Result<C64> {
    Ok(ehrenfest_residual_levels(spec, config, site, reg)?.extrapolated)
}

/// Characteristic size of ∂S/∂x_site fluctuations under the Gaussian weight:
/// √(h·H_site,site) with H the action Hessian on the classical path. The
/// natural yardstick for calling a residual "small".
pub fn gradient_scale(spec: &KernelSpec, config: LatticeConfig, site: usize) -> Result<f64> {
    if site == 0 || site > config.n {
        return Err(Error::InvalidParameter(format!(
            "site must lie in 1..={}, got {site}",
            config.n
        )));
    }
    let path = crate::lattice::classical_path_solve(&spec.lagrangian, config)?;
    let (diag, _) = crate::lattice::hessian_tridiagonal(&spec.lagrangian, &path);
    Ok((spec.h * diag[site - 1].abs()).sqrt())
}
