//! Closed-form lattice kernels for quadratic actions. The n interior
//! integrals are Fresnel–Gaussian, so the kernel collapses to
//! prefactor · e^{iS*/h} / √Δ_n with S* the action of the discrete classical
//! path and Δ_n the determinant of the dimensionless fluctuation matrix
//! tridiag(2 − ε′²ω², −1). Minor positivity is tracked during the recursion
//! so configurations beyond the first focal crossing are rejected rather
//! than branch-guessed.

use super::{KernelSpec, KernelValue, Normalization};
use crate::error::{Error, Result};
use crate::lattice::{
    classical_path_solve, discrete_action, LagrangianKind, LagrangianSpec, LatticeConfig,
    LatticePath,
};
use crate::numerics::minor_recursion;
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_4, PI};

fn reject_quartic(lagrangian: &LagrangianSpec) -> Result<()> {
    if lagrangian.kind() == LagrangianKind::Quartic {
        return Err(Error::UnsupportedLagrangian { kind: "quartic" });
    }
    Ok(())
}

fn check_focal(lagrangian: &LagrangianSpec, config: &LatticeConfig) -> Result<()> {
    if lagrangian.omega() > 0.0 {
        let s = (lagrangian.omega() * config.duration()).sin();
        if s.abs() <= 1e-6 {
            return Err(Error::FocalPoint { sin_omega_t: s });
        }
    }
    Ok(())
}

/// ε′ · Δ_n, where Δ_n = det tridiag(2 − ε′²ω², −1) over the n interior
/// points. As the slicing refines this converges to sin(ωT)/ω (and equals
/// T exactly for the free particle, where Δ_n = n + 1). Quadratic
/// Lagrangians only; a minor turning nonpositive means the configuration
/// lies at or beyond a focal point and is rejected.
pub fn fluctuation_determinant_scaled(
    lagrangian: &LagrangianSpec,
    config: &LatticeConfig,
) -> Result<f64> {
    reject_quartic(lagrangian)?;
    let eps = config.eps_prime();
    let a = 2.0 - eps * eps * lagrangian.omega() * lagrangian.omega();
    let diag = vec![a; config.n];
    let off = vec![-1.0; config.n.saturating_sub(1)];
    let (det, positive) = minor_recursion(&diag, &off, |_| {});
    if !positive {
        return Err(Error::FocalPoint {
            sin_omega_t: (lagrangian.omega() * config.duration()).sin(),
        });
    }
    Ok(eps * det)
}

/// The kernel of the sliced action, evaluated in closed form (free and
/// harmonic only). With the exact normalization,
/// K = √(m/(2πih·ε′Δ_n))·e^{iS*/h}; the free case is independent of n
/// because ε′Δ_n = T identically.
pub fn lattice_kernel_exact(spec: &KernelSpec, config: LatticeConfig) -> Result<KernelValue> {
    reject_quartic(&spec.lagrangian)?;
    check_focal(&spec.lagrangian, &config)?;
    let scaled_det = fluctuation_determinant_scaled(&spec.lagrangian, &config)?;
    let path = if config.n == 0 {
        LatticePath::new(config, Vec::new())?
    } else {
        classical_path_solve(&spec.lagrangian, config)?
    };
    let action = discrete_action(&spec.lagrangian, &path);
    let eps = config.eps_prime();
    let m = spec.lagrangian.mass();
    let value = match spec.normalization {
        Normalization::Exact => C64::from_polar(
            (m / (2.0 * PI * spec.h * scaled_det)).sqrt(),
            action / spec.h - FRAC_PI_4,
        ),
        Normalization::Literal => {
            // (hε′)^{−n/2} · (2πihε′/m)^{n/2} / √Δ_n = (2π/m)^{n/2}·e^{iπn/4}/√Δ_n
            let det = scaled_det / eps;
            C64::from_polar(
                (2.0 * PI / m).sqrt().powi(config.n as i32) / det.sqrt(),
                action / spec.h + config.n as f64 * FRAC_PI_4,
            )
        }
    };
    Ok(KernelValue {
        value,
        config,
        eta_used: 0.0,
        extrapolated: false,
    })
}

/// The exact factor by which the (hε′)^{−n/2} prefactor misses the
/// n-independent normalization: K_literal / K_exact =
/// (2π/m)^{(n+1)/2} · (hε′)^{1/2} · e^{iπ(n+1)/4}.
pub fn literal_prefactor_ratio(spec: &KernelSpec, config: &LatticeConfig) -> C64 {
    let eps = config.eps_prime();
    let m = spec.lagrangian.mass();
    let half_powers = (config.n + 1) as i32;
    C64::from_polar(
        (2.0 * PI / m).sqrt().powi(half_powers) * (spec.h * eps).sqrt(),
        half_powers as f64 * FRAC_PI_4,
    )
}

/// The kernel at quantum scale μ·h: the member of the rescaled family that
/// the control transformation maps the base kernel onto. By construction it
/// is the exact kernel evaluated at h·μ, and it equals the kernel of the
/// rescaled action S → S/μ (mass and coupling divided by μ) at scale h.
pub fn dressed_kernel(spec: &KernelSpec, config: LatticeConfig, mu: f64) -> Result<KernelValue> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale factor must be positive and finite, got {mu}"
        )));
    }
    let scaled = KernelSpec {
        h: spec.h * mu,
        ..*spec
    };
    lattice_kernel_exact(&scaled, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{estimate_convergence_order, ExtrapolationLadder};
    use crate::propagator::{oracle_free_kernel, oracle_harmonic_kernel};

    fn free_spec() -> KernelSpec {
        KernelSpec::exact(LagrangianSpec::free(1.0).unwrap(), 1.0).unwrap()
    }

    fn harmonic_spec() -> KernelSpec {
        KernelSpec::exact(LagrangianSpec::harmonic(1.0, 1.0).unwrap(), 1.0).unwrap()
    }

    fn unit_config(n: usize) -> LatticeConfig {
        LatticeConfig::new(0.0, 1.0, 0.0, 1.0, n).unwrap()
    }

    #[test]
    fn free_kernel_is_independent_of_the_slice_count() {
        let oracle = oracle_free_kernel(1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!((oracle.norm() - 0.39894).abs() < 1e-5);
        for n in 1..=64 {
            let k = lattice_kernel_exact(&free_spec(), unit_config(n)).unwrap();
            assert!(
                (k.value - oracle).norm() <= 1e-12 * oracle.norm(),
                "n = {n}: {} vs oracle {}",
                k.value,
                oracle
            );
            assert_eq!(k.eta_used, 0.0);
            assert!(!k.extrapolated);
        }
    }

    #[test]
    fn free_determinant_counts_slices_exactly() {
        let lag = LagrangianSpec::free(1.0).unwrap();
        for n in [1usize, 5, 33] {
            let config = LatticeConfig::new(0.0, 1.0, 0.0, 2.0, n).unwrap();
            let scaled = fluctuation_determinant_scaled(&lag, &config).unwrap();
            // ε′·(n+1) reassembles the duration to the last bit or two.
            assert!((scaled - 2.0).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn harmonic_determinant_approaches_the_continuum_at_second_order() {
        let lag = LagrangianSpec::harmonic(1.0, 1.0).unwrap();
        let reference = C64::new(1.0f64.sin(), 0.0);
        let mut params = Vec::new();
        let mut values = Vec::new();
        for n in [7usize, 15, 31, 63] {
            let config = unit_config(n);
            params.push(config.eps_prime());
            let scaled = fluctuation_determinant_scaled(&lag, &config).unwrap();
            values.push(C64::new(scaled, 0.0));
        }
        let ladder = ExtrapolationLadder::new(params, values).unwrap();
        let order = estimate_convergence_order(&ladder, reference).unwrap();
        assert!(
            (order - 2.0).abs() <= 0.1,
            "determinant convergence order {order}"
        );
    }

    #[test]
    fn harmonic_kernel_converges_to_the_oracle() {
        let config0 = LatticeConfig::new(0.0, 0.0, 0.0, 1.0, 7).unwrap();
        let oracle = oracle_harmonic_kernel(1.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let mut errors = Vec::new();
        for n in [7usize, 15, 31, 63] {
            let config = LatticeConfig { n, ..config0 };
            let k = lattice_kernel_exact(&harmonic_spec(), config).unwrap();
            errors.push((k.value - oracle).norm() / oracle.norm());
        }
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(
                order >= 1.9,
                "kernel convergence order {order:.3} ({errors:?})"
            );
        }
    }

    #[test]
    fn zero_frequency_harmonic_equals_free() {
        let free = free_spec();
        let harmonic =
            KernelSpec::exact(LagrangianSpec::harmonic(1.0, 0.0).unwrap(), 1.0).unwrap();
        for n in [1usize, 3, 10] {
            let config = LatticeConfig::new(-0.4, 0.8, 0.0, 1.5, n).unwrap();
            let a = lattice_kernel_exact(&free, config).unwrap().value;
            let b = lattice_kernel_exact(&harmonic, config).unwrap().value;
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn literal_prefactor_differs_by_the_documented_ratio() {
        for n in [0usize, 1, 2, 5, 16] {
            let config = unit_config(n);
            let exact = lattice_kernel_exact(&free_spec(), config).unwrap().value;
            let literal_spec = KernelSpec {
                normalization: Normalization::Literal,
                ..free_spec()
            };
            let literal = lattice_kernel_exact(&literal_spec, config).unwrap().value;
            let ratio = literal_prefactor_ratio(&free_spec(), &config);
            assert!(
                (literal - ratio * exact).norm() <= 1e-12 * literal.norm(),
                "n = {n}: literal {} vs ratio×exact {}",
                literal,
                ratio * exact
            );
            // The ratio to the closed-form kernel is the same factor: the
            // exact-normalized lattice kernel IS the free oracle.
            let oracle = oracle_free_kernel(1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
            assert!((literal / oracle - ratio).norm() <= 1e-12 * ratio.norm());
        }
    }

    #[test]
    fn single_slice_kernel_matches_the_boundary_formula() {
        // n = 0: no interior integral, K = √(m/(2πihT))·e^{iS₀/h} with S₀
        // the one-slice action.
        let spec = harmonic_spec();
        let config = LatticeConfig::new(0.2, 0.9, 0.0, 1.3, 0).unwrap();
        let k = lattice_kernel_exact(&spec, config).unwrap().value;
        let path = LatticePath::new(config, Vec::new()).unwrap();
        let s0 = discrete_action(&spec.lagrangian, &path);
        let want = C64::from_polar(
            (1.0 / (2.0 * PI * 1.3)).sqrt(),
            s0 - FRAC_PI_4,
        );
        assert!((k - want).norm() <= 1e-14);
    }

    #[test]
    fn quartic_has_no_closed_form() {
        let spec = KernelSpec::exact(LagrangianSpec::quartic(1.0, 1.0, 0.1).unwrap(), 1.0)
            .unwrap();
        let err = lattice_kernel_exact(&spec, unit_config(4)).unwrap_err();
        assert_eq!(err.code(), "unsupported_lagrangian");
    }

    #[test]
    fn focal_configurations_are_rejected_not_branch_guessed() {
        // Just below ωT = π the determinant is still positive; at and beyond
        // it the minors cross zero.
        let near = LatticeConfig::new(0.0, 0.5, 0.0, PI - 1e-7, 15).unwrap();
        assert!(matches!(
            lattice_kernel_exact(&harmonic_spec(), near).unwrap_err(),
            Error::FocalPoint { .. }
        ));
        let beyond = LatticeConfig::new(0.0, 0.5, 0.0, 3.3, 15).unwrap();
        assert!(matches!(
            lattice_kernel_exact(&harmonic_spec(), beyond).unwrap_err(),
            Error::FocalPoint { .. }
        ));
    }

    #[test]
    fn dressed_kernel_is_the_rescaled_quantum_scale() {
        let config = unit_config(9);
        for mu in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let dressed = dressed_kernel(&harmonic_spec(), config, mu).unwrap();
            let direct = lattice_kernel_exact(
                &KernelSpec {
                    h: mu,
                    ..harmonic_spec()
                },
                config,
            )
            .unwrap();
            assert_eq!(dressed.value.re.to_bits(), direct.value.re.to_bits());
            assert_eq!(dressed.value.im.to_bits(), direct.value.im.to_bits());
        }
    }

    #[test]
    fn dressed_kernel_equals_the_rescaled_action_route() {
        // Scale h by μ, or divide the action by μ (mass, coupling → /μ):
        // both compute e^{iS/(μh)} under the same prefactor.
        let config = LatticeConfig::new(0.3, -0.5, 0.0, 1.2, 7).unwrap();
        for mu in [0.1, 0.5, 2.0, 10.0] {
            let dressed = dressed_kernel(&harmonic_spec(), config, mu).unwrap().value;
            let rescaled_spec = KernelSpec::exact(
                harmonic_spec().lagrangian.rescaled(mu).unwrap(),
                1.0,
            )
            .unwrap();
            let rescaled = lattice_kernel_exact(&rescaled_spec, config).unwrap().value;
            assert!(
                (dressed - rescaled).norm() <= 1e-15 * dressed.norm(),
                "mu = {mu}: {dressed} vs {rescaled}"
            );
        }
    }

    #[test]
    fn dressed_modulus_scales_as_inverse_root_of_mu() {
        let config = LatticeConfig::new(0.0, 0.0, 0.0, 1.0, 63).unwrap();
        let base = dressed_kernel(&harmonic_spec(), config, 1.0).unwrap().value;
        for mu in [0.5, 2.0, 4.0] {
            let k = dressed_kernel(&harmonic_spec(), config, mu).unwrap().value;
            assert!(
                (k.norm() * mu.sqrt() - base.norm()).abs() <= 1e-12 * base.norm(),
                "mu = {mu}"
            );
            // And the Mehler oracle evaluated at h·μ agrees with the lattice
            // value to the discretization error seen at n = 63.
            let oracle = oracle_harmonic_kernel(1.0, 1.0, mu, 0.0, 0.0, 1.0).unwrap();
            assert!((k - oracle).norm() <= 1e-4 * oracle.norm());
        }
    }
}
