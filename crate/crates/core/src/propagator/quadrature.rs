//! Direct damped quadrature of the sliced kernel over its interior points —
//! the route that stays open when the action is not quadratic. Dimension is
//! capped at 3: the cost guard for an approach whose node count multiplies
//! with every slice.

use super::contraction::SliceEngine;
use super::{KernelSpec, KernelValue};
use crate::error::{Error, Result};
use crate::lattice::{discrete_action, LatticeConfig, LatticePath};
use crate::numerics::{extrapolate_levels, DampedLevels, RegularizationParams};
use num_complex::Complex64 as C64;

const MAX_INTERIOR: usize = 3;

/// The η ladder behind [`lattice_kernel_quadrature`], one damped kernel per
/// level plus the extrapolated limit.
pub fn lattice_kernel_quadrature_levels(
    spec: &KernelSpec,
    config: LatticeConfig,
    reg: &RegularizationParams,
) -> Result<DampedLevels> {
    if config.n > MAX_INTERIOR {
        return Err(Error::DimensionTooLarge {
            n: config.n,
            max: MAX_INTERIOR,
        });
    }
    if config.n == 0 {
        // No interior integral: the kernel is the prefactor times the
        // single-slice phase, and no damping is involved.
        let path = LatticePath::new(config, Vec::new())?;
        let action = discrete_action(&spec.lagrangian, &path);
        let value =
            super::normalization_prefactor(spec, &config) * C64::from_polar(1.0, action / spec.h);
        return Ok(DampedLevels {
            etas: vec![0.0],
            values: vec![value],
            extrapolated: value,
        });
    }
    let engine = SliceEngine::new(&spec.lagrangian, config, spec.h, reg)?;
    let prefactor = super::normalization_prefactor(spec, &config);
    let etas = engine.etas().to_vec();
    let values: Vec<C64> = etas
        .iter()
        .map(|&eta| Ok(prefactor * engine.contract(eta, None)?))
        .collect::<Result<_>>()?;
    let extrapolated = extrapolate_levels(&etas, &values)?;
    Ok(DampedLevels {
        etas,
        values,
        extrapolated,
    })
}

/// Kernel of the sliced action by damped oscillatory quadrature over the
/// n ≤ 3 interior points, η-extrapolated. Cross-validates
/// [`super::lattice_kernel_exact`] on quadratic actions and is the only
/// route for the quartic coupling.
pub fn lattice_kernel_quadrature(
    spec: &KernelSpec,
    config: LatticeConfig,
    reg: &RegularizationParams,
) -> Result<KernelValue> {
    let levels = lattice_kernel_quadrature_levels(spec, config, reg)?;
    Ok(KernelValue {
        value: levels.extrapolated,
        config,
        eta_used: *levels.etas.last().expect("at least one level"),
        extrapolated: levels.values.len() > 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LagrangianSpec;
    use crate::numerics::EtaLadder;
    use crate::propagator::{
        lattice_kernel_exact, oracle_free_kernel, Normalization,
    };

    fn unit_config(n: usize) -> LatticeConfig {
        LatticeConfig::new(0.0, 1.0, 0.0, 1.0, n).unwrap()
    }

    #[test]
    fn free_single_point_matches_the_exact_route() {
        let spec = KernelSpec::exact(LagrangianSpec::free(1.0).unwrap(), 1.0).unwrap();
        let config = unit_config(1);
        let exact = lattice_kernel_exact(&spec, config).unwrap().value;
        let quad = lattice_kernel_quadrature(&spec, config, &RegularizationParams::default())
            .unwrap();
        assert!(
            (quad.value - exact).norm() <= 1e-3 * exact.norm(),
            "quadrature {} vs exact {}",
            quad.value,
            exact
        );
        assert!(quad.extrapolated);
        assert!(quad.eta_used > 0.0);
    }

    #[test]
    fn harmonic_two_point_matches_the_exact_route() {
        let spec = KernelSpec::exact(LagrangianSpec::harmonic(1.0, 1.0).unwrap(), 1.0).unwrap();
        let config = unit_config(2);
        let exact = lattice_kernel_exact(&spec, config).unwrap().value;
        let quad = lattice_kernel_quadrature(&spec, config, &RegularizationParams::default())
            .unwrap();
        assert!(
            (quad.value - exact).norm() <= 1e-3 * exact.norm(),
            "quadrature {} vs exact {}",
            quad.value,
            exact
        );
    }

    #[test]
    fn vanishing_quartic_coupling_reduces_to_the_free_oracle() {
        let spec =
            KernelSpec::exact(LagrangianSpec::quartic(1.0, 0.0, 0.0).unwrap(), 1.0).unwrap();
        let config = unit_config(1);
        let oracle = oracle_free_kernel(1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let quad = lattice_kernel_quadrature(&spec, config, &RegularizationParams::default())
            .unwrap();
        assert!((quad.value - oracle).norm() <= 1e-3 * oracle.norm());
    }

    #[test]
    fn quartic_shift_matches_first_order_perturbation_theory() {
        // λ x⁴ on a free two-point lattice, φ₀ = φ₁ = 0, T = 1. To first
        // order the relative shift is −(iλε′/h)·Σ⟨x_j⁴⟩ with Gaussian
        // moments ⟨x_j⁴⟩ = 3·(ih·(H⁻¹)_jj)². Here H = 3·[[2,−1],[−1,2]],
        // so (H⁻¹)_jj = 2/9 and the shift is i·3λε′h·2·(2/9)² ≈ 0.00988i.
        //
        // Both couplings run on one explicit ladder so the damping bias
        // cancels in the ratio, with the floor high enough (η·Σx² ≈ 15 at
        // the quartic's runaway saddles, Σx² = 45) to keep their caustic
        // leakage out of every level.
        let lambda = 0.1;
        let eps = 1.0 / 3.0;
        let predicted = C64::new(0.0, 3.0 * lambda * eps * 2.0 * (2.0 / 9.0f64).powi(2));
        let config = LatticeConfig::new(0.0, 0.0, 0.0, 1.0, 2).unwrap();
        let floor = 0.326;
        let reg = RegularizationParams {
            eta: EtaLadder::Explicit(vec![4.0 * floor, 2.0 * floor, floor]),
            ..RegularizationParams::default()
        };

        let base_spec =
            KernelSpec::exact(LagrangianSpec::quartic(1.0, 0.0, 0.0).unwrap(), 1.0).unwrap();
        let base = lattice_kernel_quadrature(&base_spec, config, &reg).unwrap().value;
        let spec =
            KernelSpec::exact(LagrangianSpec::quartic(1.0, 0.0, lambda).unwrap(), 1.0).unwrap();
        let shifted = lattice_kernel_quadrature(&spec, config, &reg).unwrap().value;

        let observed = shifted / base - C64::new(1.0, 0.0);
        assert!(
            observed.im > 0.0,
            "first-order shift should rotate with +iλ, got {observed}"
        );
        assert!(
            (observed - predicted).norm() <= 0.3 * predicted.norm(),
            "observed {observed} vs perturbative {predicted}"
        );
    }

    #[test]
    fn literal_prefactor_is_consistent_across_routes() {
        let spec = KernelSpec::new(
            LagrangianSpec::free(1.0).unwrap(),
            1.0,
            Normalization::Literal,
        )
        .unwrap();
        let config = unit_config(1);
        let exact = lattice_kernel_exact(&spec, config).unwrap().value;
        let quad = lattice_kernel_quadrature(&spec, config, &RegularizationParams::default())
            .unwrap();
        assert!((quad.value - exact).norm() <= 1e-3 * exact.norm());
    }

    #[test]
    fn no_interior_points_matches_the_exact_route_directly() {
        let spec = KernelSpec::exact(LagrangianSpec::harmonic(1.2, 0.7).unwrap(), 0.9).unwrap();
        let config = LatticeConfig::new(0.3, -0.4, 0.0, 1.1, 0).unwrap();
        let exact = lattice_kernel_exact(&spec, config).unwrap().value;
        let quad = lattice_kernel_quadrature(&spec, config, &RegularizationParams::default())
            .unwrap();
        assert!((quad.value - exact).norm() <= 1e-14 * exact.norm());
        assert!(!quad.extrapolated);
        assert_eq!(quad.eta_used, 0.0);
    }

    #[test]
    fn four_interior_points_are_too_many() {
        let spec = KernelSpec::exact(LagrangianSpec::free(1.0).unwrap(), 1.0).unwrap();
        let err = lattice_kernel_quadrature(
            &spec,
            unit_config(4),
            &RegularizationParams::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::DimensionTooLarge { n: 4, max: 3 });
    }

    #[test]
    fn identical_inputs_give_bit_identical_kernels() {
        let spec = KernelSpec::exact(LagrangianSpec::quartic(1.0, 1.0, 0.05).unwrap(), 1.0)
            .unwrap();
        let config = LatticeConfig::new(0.1, 0.6, 0.0, 1.0, 1).unwrap();
        let reg = RegularizationParams {
            eta: EtaLadder::Auto { levels: 4 },
            step_budget: 1 << 18,
        };
        let a = lattice_kernel_quadrature(&spec, config, &reg).unwrap().value;
        let b = lattice_kernel_quadrature(&spec, config, &reg).unwrap().value;
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
