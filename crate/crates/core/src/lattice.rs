//! Time-sliced actions on a uniform grid: the discrete functional
//! S_n = ε′ · Σ_{j=0}^{n} [ m·v_j²/2 − V(x_j) ] with forward-difference
//! velocity v_j = (x_{j+1} − x_j)/ε′ and the potential sampled at the left
//! slice point, together with its exact gradient, tridiagonal Hessian, and
//! the discrete classical path (Newton on the gradient).

use crate::error::{Error, Result};
use crate::numerics::tridiagonal_solve;

/// Distance from a focal time (ωT a multiple of π) below which harmonic
/// boundary-value problems are rejected.
const FOCAL_TOLERANCE: f64 = 1e-6;
/// Gradient max-norm at which the Newton iteration declares convergence.
const NEWTON_TOLERANCE: f64 = 1e-10;
const NEWTON_MAX_ITERATIONS: usize = 100;

/// Lagrangian family: L(x, v) = m·v²/2 − m·ω²·x²/2 − λ·x⁴.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagrangianKind {
    Free,
    Harmonic,
    Quartic,
}

/// A validated Lagrangian: positive mass, nonnegative frequency, and a
/// quartic coupling that is only nonzero for the quartic kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianSpec {
    kind: LagrangianKind,
    mass: f64,
    omega: f64,
    lambda: f64,
}

impl LagrangianSpec {
    pub fn free(mass: f64) -> Result<Self> {
        Self::build(LagrangianKind::Free, mass, 0.0, 0.0)
    }

    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        Self::build(LagrangianKind::Harmonic, mass, omega, 0.0)
    }

    pub fn quartic(mass: f64, omega: f64, lambda: f64) -> Result<Self> {
        Self::build(LagrangianKind::Quartic, mass, omega, lambda)
    }

    fn build(kind: LagrangianKind, mass: f64, omega: f64, lambda: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be nonnegative and finite, got {omega}"
            )));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite".into()));
        }
        if kind == LagrangianKind::Free && omega != 0.0 {
            return Err(Error::InvalidParameter(
                "free Lagrangian cannot carry a frequency".into(),
            ));
        }
        if kind != LagrangianKind::Quartic && lambda != 0.0 {
            return Err(Error::InvalidParameter(
                "quartic coupling requires the quartic kind".into(),
            ));
        }
        Ok(Self {
            kind,
            mass,
            omega,
            lambda,
        })
    }

    pub fn kind(&self) -> LagrangianKind {
        self.kind
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// V(x) = m·ω²·x²/2 + λ·x⁴.
    pub fn potential(&self, x: f64) -> f64 {
        0.5 * self.mass * self.omega * self.omega * x * x + self.lambda * x * x * x * x
    }

    /// V′(x) = m·ω²·x + 4λ·x³.
    pub fn potential_slope(&self, x: f64) -> f64 {
        self.mass * self.omega * self.omega * x + 4.0 * self.lambda * x * x * x
    }

    /// V″(x) = m·ω² + 12λ·x².
    pub fn potential_curvature(&self, x: f64) -> f64 {
        self.mass * self.omega * self.omega + 12.0 * self.lambda * x * x
    }

    /// L(x, v) = m·v²/2 − V(x).
    pub fn lagrangian(&self, x: f64, v: f64) -> f64 {
        0.5 * self.mass * v * v - self.potential(x)
    }

    /// The same dynamics with mass and coupling divided by `mu` — the action
    /// rescaling S → S/μ. The harmonic term scales through the mass
    /// (ω is a frequency, not a coupling), the quartic term explicitly.
    pub fn rescaled(&self, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive and finite, got {mu}"
            )));
        }
        Self::build(self.kind, self.mass / mu, self.omega, self.lambda / mu)
    }
}

/// Boundary data of a sliced path: endpoint values, the time interval, and
/// the interior point count n. The slice width is ε′ = (t1 − t0)/(n + 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    pub phi0: f64,
    pub phi1: f64,
    pub t0: f64,
    pub t1: f64,
    pub n: usize,
}

impl LatticeConfig {
    pub fn new(phi0: f64, phi1: f64, t0: f64, t1: f64, n: usize) -> Result<Self> {
        if ![phi0, phi1, t0, t1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "boundary values and times must be finite".into(),
            ));
        }
        if t1 <= t0 {
            return Err(Error::InvalidParameter(format!(
                "time interval must be ordered, got t0 = {t0}, t1 = {t1}"
            )));
        }
        Ok(Self {
            phi0,
            phi1,
            t0,
            t1,
            n,
        })
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Slice width ε′ = (t1 − t0)/(n + 1).
    pub fn eps_prime(&self) -> f64 {
        self.duration() / (self.n + 1) as f64
    }

    /// Time of grid node i ∈ {0, …, n+1}.
    pub fn node_time(&self, i: usize) -> f64 {
        self.t0 + self.eps_prime() * i as f64
    }
}

/// A sliced path: boundary data plus the n interior values x₁ … x_n.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePath {
    config: LatticeConfig,
    interior: Vec<f64>,
}

impl LatticePath {
    pub fn new(config: LatticeConfig, interior: Vec<f64>) -> Result<Self> {
        if interior.len() != config.n {
            return Err(Error::InvalidParameter(format!(
                "interior must hold {} values, got {}",
                config.n,
                interior.len()
            )));
        }
        if interior.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "interior values must be finite".into(),
            ));
        }
        Ok(Self { config, interior })
    }

    /// Linear interpolation between the boundary values.
    pub fn straight_line(config: LatticeConfig) -> Self {
        let interior = (1..=config.n)
            .map(|i| {
                let s = i as f64 / (config.n + 1) as f64;
                config.phi0 + s * (config.phi1 - config.phi0)
            })
            .collect();
        Self { config, interior }
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    /// Grid node i ∈ {0, …, n+1}: boundaries at the ends, interior between.
    pub fn node(&self, i: usize) -> f64 {
        if i == 0 {
            self.config.phi0
        } else if i == self.config.n + 1 {
            self.config.phi1
        } else {
            self.interior[i - 1]
        }
    }
}

/// S_n = ε′ · Σ_{j=0}^{n} L(x_j, (x_{j+1} − x_j)/ε′) with x₀, x_{n+1} the
/// boundary values: forward-difference velocity, potential at the left node.
pub fn discrete_action(lagrangian: &LagrangianSpec, path: &LatticePath) -> f64 {
    let eps = path.config.eps_prime();
    let n = path.config.n;
    let mut acc = 0.0;
    for j in 0..=n {
        let x = path.node(j);
        let v = (path.node(j + 1) - x) / eps;
        acc += lagrangian.lagrangian(x, v);
    }
    eps * acc
}

/// Exact gradient ∂S_n/∂x_i over the interior points:
/// g_i = m·(2x_i − x_{i−1} − x_{i+1})/ε′ − ε′·V′(x_i).
pub fn action_gradient(lagrangian: &LagrangianSpec, path: &LatticePath) -> Vec<f64> {
    let eps = path.config.eps_prime();
    let m = lagrangian.mass();
    (1..=path.config.n)
        .map(|i| {
            let x = path.node(i);
            m * (2.0 * x - path.node(i - 1) - path.node(i + 1)) / eps
                - eps * lagrangian.potential_slope(x)
        })
        .collect()
}

/// Tridiagonal Hessian ∂²S_n/∂x_i∂x_j of the interior points:
/// diagonal 2m/ε′ − ε′·V″(x_i), off-diagonal −m/ε′.
pub fn hessian_tridiagonal(
    lagrangian: &LagrangianSpec,
    path: &LatticePath,
) -> (Vec<f64>, Vec<f64>) {
    let eps = path.config.eps_prime();
    let m = lagrangian.mass();
    let diag = (1..=path.config.n)
        .map(|i| 2.0 * m / eps - eps * lagrangian.potential_curvature(path.node(i)))
        .collect();
    let off = vec![-m / eps; path.config.n.saturating_sub(1)];
    (diag, off)
}

/// The discrete classical path: Newton iteration on [`action_gradient`]
/// with the exact tridiagonal Hessian, started from the straight line.
/// Converges when the gradient max-norm drops to 10⁻¹⁰.
pub fn classical_path_solve(
    lagrangian: &LagrangianSpec,
    config: LatticeConfig,
) -> Result<LatticePath> {
    if config.n == 0 {
        return Err(Error::InvalidParameter(
            "classical path needs at least one interior point".into(),
        ));
    }
    // Harmonic boundary-value problems degenerate when ωT approaches a
    // multiple of π: infinitely many (or no) classical paths.
    if lagrangian.omega() > 0.0 {
        let angle = lagrangian.omega() * config.duration();
        let nearest = (angle / std::f64::consts::PI).round() * std::f64::consts::PI;
        if (angle - nearest).abs() < FOCAL_TOLERANCE {
            return Err(Error::FocalPoint {
                sin_omega_t: angle.sin(),
            });
        }
    }

    let mut path = LatticePath::straight_line(config);
    let mut residual = f64::INFINITY;
    for iteration in 0..NEWTON_MAX_ITERATIONS {
        let gradient = action_gradient(lagrangian, &path);
        if gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::NewtonDivergence {
                iterations: iteration,
                residual: f64::INFINITY,
            });
        }
        residual = gradient.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if residual <= NEWTON_TOLERANCE {
            return Ok(path);
        }
        let (diag, off) = hessian_tridiagonal(lagrangian, &path);
        let step = tridiagonal_solve(&diag, &off, &gradient)?;
        for (x, s) in path.interior.iter_mut().zip(&step) {
            *x -= s;
        }
        if path.interior.iter().any(|x| !x.is_finite()) {
            return Err(Error::NewtonDivergence {
                iterations: iteration + 1,
                residual: f64::INFINITY,
            });
        }
    }
    Err(Error::NewtonDivergence {
        iterations: NEWTON_MAX_ITERATIONS,
        residual,
    })
}

/// Continuum classical action of the free particle: m·(φ₁−φ₀)²/(2T).
pub fn continuum_free_action(mass: f64, phi0: f64, phi1: f64, duration: f64) -> f64 {
    let d = phi1 - phi0;
    mass * d * d / (2.0 * duration)
}

/// Continuum classical action of the harmonic oscillator:
/// (mω/(2 sin ωT))·[(φ₀² + φ₁²) cos ωT − 2φ₀φ₁]; the ω → 0 limit is the
/// free value. Rejects focal configurations (sin ωT ≈ 0).
pub fn continuum_harmonic_action(
    mass: f64,
    omega: f64,
    phi0: f64,
    phi1: f64,
    duration: f64,
) -> Result<f64> {
    if omega == 0.0 {
        return Ok(continuum_free_action(mass, phi0, phi1, duration));
    }
    let s = (omega * duration).sin();
    if s.abs() <= FOCAL_TOLERANCE {
        return Err(Error::FocalPoint { sin_omega_t: s });
    }
    let c = (omega * duration).cos();
    Ok(mass * omega / (2.0 * s) * ((phi0 * phi0 + phi1 * phi1) * c - 2.0 * phi0 * phi1))
}

/// Continuum harmonic classical path x(t) = (φ₁ sin ωt + φ₀ sin ω(T−t))/sin ωT
/// for t measured from the left endpoint.
pub fn continuum_harmonic_path(
    omega: f64,
    phi0: f64,
    phi1: f64,
    duration: f64,
    t: f64,
) -> Result<f64> {
    if omega == 0.0 {
        return Ok(phi0 + (phi1 - phi0) * t / duration);
    }
    let s = (omega * duration).sin();
    if s.abs() <= FOCAL_TOLERANCE {
        return Err(Error::FocalPoint { sin_omega_t: s });
    }
    Ok((phi1 * (omega * t).sin() + phi0 * (omega * (duration - t)).sin()) / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_config(n: usize) -> LatticeConfig {
        LatticeConfig::new(0.0, 1.0, 0.0, 1.0, n).unwrap()
    }

    /// Central finite differences of the action over interior points.
    fn gradient_by_differences(lag: &LagrangianSpec, path: &LatticePath) -> Vec<f64> {
        let mut out = Vec::with_capacity(path.config().n);
        for i in 0..path.config().n {
            let x = path.interior()[i];
            let h = 1e-5 * (1.0 + x.abs());
            let mut plus = path.clone();
            plus.interior[i] = x + h;
            let mut minus = path.clone();
            minus.interior[i] = x - h;
            out.push((discrete_action(lag, &plus) - discrete_action(lag, &minus)) / (2.0 * h));
        }
        out
    }

    #[test]
    fn free_straight_line_action_is_half() {
        let lag = LagrangianSpec::free(1.0).unwrap();
        for n in [0usize, 1, 2, 5, 7, 16] {
            let path = LatticePath::straight_line(unit_config(n));
            let s = discrete_action(&lag, &path);
            assert!(
                (s - 0.5).abs() <= 1e-12,
                "n = {n}: free straight-line action {s}"
            );
        }
        // Power-of-two slicing keeps every arithmetic step exact.
        let path = LatticePath::straight_line(unit_config(7));
        assert_eq!(discrete_action(&lag, &path), 0.5);
    }

    #[test]
    fn single_slice_action_is_the_boundary_formula() {
        let lag = LagrangianSpec::quartic(1.3, 0.7, 0.2).unwrap();
        let config = LatticeConfig::new(0.4, -0.9, 0.5, 2.5, 0).unwrap();
        let path = LatticePath::new(config, vec![]).unwrap();
        let t = config.duration();
        let want = t * lag.lagrangian(0.4, (-0.9 - 0.4) / t);
        assert_eq!(discrete_action(&lag, &path), want);
    }

    #[test]
    fn harmonic_action_approaches_the_continuum_on_symmetric_boundaries() {
        // V(φ₀) = V(φ₁) removes the left-endpoint boundary term, so the
        // approach is second order in ε′.
        let lag = LagrangianSpec::harmonic(1.0, 1.0).unwrap();
        let continuum = continuum_harmonic_action(1.0, 1.0, 0.3, -0.3, 1.0).unwrap();
        let mut errors = Vec::new();
        for n in [7usize, 15, 31, 63] {
            let config = LatticeConfig::new(0.3, -0.3, 0.0, 1.0, n).unwrap();
            let path = classical_path_solve(&lag, config).unwrap();
            errors.push((discrete_action(&lag, &path) - continuum).abs());
        }
        assert!(errors[3] <= 1e-3, "finest-level error {:.3e}", errors[3]);
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(
                order >= 1.9,
                "continuum approach should be second order, got {order:.3} ({errors:?})"
            );
        }
    }

    #[test]
    fn asymmetric_boundaries_carry_the_left_endpoint_term() {
        // With V(φ₀) ≠ V(φ₁) the left-endpoint potential rule leaves a
        // first-order gap of (ε′/2)·(V(φ₁) − V(φ₀)); pin it quantitatively.
        let lag = LagrangianSpec::harmonic(1.0, 1.0).unwrap();
        // cos(1)/(2·sin(1))
        let continuum = continuum_harmonic_action(1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!((continuum - 0.3210463).abs() < 1e-6);
        for n in [31usize, 63] {
            let config = LatticeConfig::new(0.0, 1.0, 0.0, 1.0, n).unwrap();
            let path = classical_path_solve(&lag, config).unwrap();
            let gap = discrete_action(&lag, &path) - continuum;
            let boundary_term =
                0.5 * config.eps_prime() * (lag.potential(1.0) - lag.potential(0.0));
            assert!(
                (gap - boundary_term).abs() <= 0.15 * boundary_term.abs(),
                "n = {n}: gap {gap:.6e} vs boundary term {boundary_term:.6e}"
            );
        }
    }

    #[test]
    fn free_straight_line_gradient_vanishes() {
        let lag = LagrangianSpec::free(1.0).unwrap();
        let path = LatticePath::straight_line(unit_config(7));
        for g in action_gradient(&lag, &path) {
            assert_eq!(g, 0.0);
        }
        let path = LatticePath::straight_line(unit_config(6));
        for g in action_gradient(&lag, &path) {
            assert!(g.abs() <= 1e-12);
        }
    }

    #[test]
    fn single_point_gradient_points_uphill() {
        // n=1, φ₀=φ₁=0, x₁=a: the only term is m·2a/ε′ = 2a(n+1)m/T.
        let lag = LagrangianSpec::free(1.0).unwrap();
        let config = LatticeConfig::new(0.0, 0.0, 0.0, 1.0, 1).unwrap();
        let path = LatticePath::new(config, vec![0.3]).unwrap();
        let g = action_gradient(&lag, &path);
        assert!((g[0] - 1.2).abs() <= 1e-15);

        let flat = LatticePath::new(config, vec![0.0]).unwrap();
        assert_eq!(action_gradient(&lag, &flat), vec![0.0]);
    }

    #[test]
    fn gradient_matches_finite_differences_on_random_paths() {
        let lags = [
            LagrangianSpec::free(1.0).unwrap(),
            LagrangianSpec::harmonic(1.3, 0.8).unwrap(),
            LagrangianSpec::quartic(0.9, 1.1, 0.25).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for lag in &lags {
            for _ in 0..100 {
                let n = rng.gen_range(1..=8);
                let config = LatticeConfig::new(
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    0.0,
                    rng.gen_range(0.5..2.0),
                    n,
                )
                .unwrap();
                let interior = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let path = LatticePath::new(config, interior).unwrap();
                let exact = action_gradient(lag, &path);
                let fd = gradient_by_differences(lag, &path);
                for (e, f) in exact.iter().zip(&fd) {
                    assert!(
                        (e - f).abs() <= 1e-6 * (1.0 + e.abs()),
                        "gradient {e} vs finite difference {f}"
                    );
                }
            }
        }
    }

    #[test]
    fn free_hessian_has_the_second_difference_form() {
        let lag = LagrangianSpec::free(1.0).unwrap();
        let path = LatticePath::straight_line(unit_config(3));
        let (diag, off) = hessian_tridiagonal(&lag, &path);
        assert_eq!(diag, vec![8.0, 8.0, 8.0]);
        assert_eq!(off, vec![-4.0, -4.0]);
    }

    #[test]
    fn zero_frequency_harmonic_matches_free_exactly() {
        let free = LagrangianSpec::free(1.4).unwrap();
        let harm = LagrangianSpec::harmonic(1.4, 0.0).unwrap();
        let config = LatticeConfig::new(-0.2, 0.9, 0.0, 1.7, 4).unwrap();
        let path = LatticePath::new(config, vec![0.1, -0.4, 0.8, 0.3]).unwrap();
        assert_eq!(
            discrete_action(&free, &path),
            discrete_action(&harm, &path)
        );
        assert_eq!(
            hessian_tridiagonal(&free, &path),
            hessian_tridiagonal(&harm, &path)
        );
    }

    #[test]
    fn hessian_matches_differentiated_gradient_on_random_quartic_paths() {
        let lag = LagrangianSpec::quartic(1.1, 0.9, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = rng.gen_range(2..=7);
            let config =
                LatticeConfig::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0, 1.0, n)
                    .unwrap();
            let interior: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let path = LatticePath::new(config, interior).unwrap();
            let (diag, off) = hessian_tridiagonal(&lag, &path);
            for j in 0..n {
                let h = 1e-5 * (1.0 + path.interior()[j].abs());
                let mut plus = path.clone();
                plus.interior[j] += h;
                let mut minus = path.clone();
                minus.interior[j] -= h;
                let gp = action_gradient(&lag, &plus);
                let gm = action_gradient(&lag, &minus);
                for i in 0..n {
                    let fd = (gp[i] - gm[i]) / (2.0 * h);
                    let want = if i == j {
                        diag[i]
                    } else if i + 1 == j || j + 1 == i {
                        off[i.min(j)]
                    } else {
                        0.0
                    };
                    assert!(
                        (fd - want).abs() <= 1e-6 * (1.0 + want.abs()),
                        "H[{i}][{j}]: finite difference {fd} vs analytic {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn free_classical_path_is_the_straight_line() {
        let lag = LagrangianSpec::free(1.0).unwrap();
        let path = classical_path_solve(&lag, unit_config(7)).unwrap();
        let want: Vec<f64> = (1..=7).map(|i| i as f64 / 8.0).collect();
        assert_eq!(path.interior(), want.as_slice());
    }

    #[test]
    fn harmonic_classical_path_tracks_the_continuum_solution() {
        let lag = LagrangianSpec::harmonic(1.0, 1.0).unwrap();
        let config = unit_config(31);
        let path = classical_path_solve(&lag, config).unwrap();
        for (i, &x) in path.interior().iter().enumerate() {
            let t = config.node_time(i + 1);
            let want = continuum_harmonic_path(1.0, 0.0, 1.0, 1.0, t).unwrap();
            assert!(
                (x - want).abs() <= 1e-3,
                "node {i}: {x} vs continuum {want}"
            );
        }
    }

    #[test]
    fn symmetric_quartic_classical_path_is_identically_zero() {
        let lag = LagrangianSpec::quartic(1.0, 1.0, 0.1).unwrap();
        let config = LatticeConfig::new(0.0, 0.0, 0.0, 1.0, 9).unwrap();
        let path = classical_path_solve(&lag, config).unwrap();
        assert!(path.interior().iter().all(|&x| x == 0.0));
        assert!(action_gradient(&lag, &path).iter().all(|&g| g == 0.0));
    }

    #[test]
    fn classical_path_minimizes_the_convex_free_action() {
        let lag = LagrangianSpec::free(1.0).unwrap();
        let config = unit_config(9);
        let path = classical_path_solve(&lag, config).unwrap();
        let base = discrete_action(&lag, &path);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut bump: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = bump.iter().map(|b| b * b).sum::<f64>().sqrt();
            for b in &mut bump {
                *b *= 1e-2 / norm;
            }
            let mut perturbed = path.clone();
            for (x, b) in perturbed.interior.iter_mut().zip(&bump) {
                *x += b;
            }
            assert!(
                discrete_action(&lag, &perturbed) > base,
                "perturbation lowers a convex action"
            );
        }
    }

    #[test]
    fn near_focal_harmonic_configs_are_rejected() {
        let lag = LagrangianSpec::harmonic(1.0, 1.0).unwrap();
        let config =
            LatticeConfig::new(0.0, 1.0, 0.0, std::f64::consts::PI - 1e-8, 15).unwrap();
        let err = classical_path_solve(&lag, config).unwrap_err();
        assert!(matches!(err, Error::FocalPoint { .. }));

        let focal_action = continuum_harmonic_action(1.0, 1.0, 0.0, 1.0, std::f64::consts::PI);
        assert!(matches!(focal_action.unwrap_err(), Error::FocalPoint { .. }));
    }

    #[test]
    fn reversal_preserves_the_action_when_boundary_potentials_match() {
        // The left-endpoint rule prices the two boundaries differently, so
        // exact reversal symmetry needs V(φ₀) = V(φ₁); the free particle has
        // no potential at all and is symmetric for any boundaries.
        let cases = [
            (LagrangianSpec::free(1.2).unwrap(), 0.4, -0.9),
            (LagrangianSpec::harmonic(1.0, 1.1).unwrap(), 0.7, -0.7),
            (LagrangianSpec::quartic(1.0, 0.9, 0.2).unwrap(), 0.5, 0.5),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for (lag, phi0, phi1) in cases {
            let n = 6;
            let config = LatticeConfig::new(phi0, phi1, 0.0, 1.3, n).unwrap();
            let interior: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let path = LatticePath::new(config, interior.clone()).unwrap();

            let reversed_config = LatticeConfig::new(phi1, phi0, 0.0, 1.3, n).unwrap();
            let reversed: Vec<f64> = interior.iter().rev().copied().collect();
            let reversed_path = LatticePath::new(reversed_config, reversed).unwrap();

            let s = discrete_action(&lag, &path);
            let sr = discrete_action(&lag, &reversed_path);
            assert!(
                (s - sr).abs() <= 1e-12 * s.abs().max(1.0),
                "reversal changed the action: {s} vs {sr}"
            );
        }
    }

    #[test]
    fn constructors_reject_inconsistent_parameters() {
        assert!(LagrangianSpec::free(0.0).is_err());
        assert!(LagrangianSpec::harmonic(1.0, -1.0).is_err());
        assert!(LagrangianSpec::harmonic(1.0, f64::NAN).is_err());
        assert!(LatticeConfig::new(0.0, 1.0, 1.0, 1.0, 3).is_err());
        let config = unit_config(3);
        assert!(LatticePath::new(config, vec![0.0; 2]).is_err());
        assert!(LatticePath::new(config, vec![0.0, f64::NAN, 0.0]).is_err());
        let lag = LagrangianSpec::free(1.0).unwrap();
        assert!(classical_path_solve(&lag, unit_config(0)).is_err());
    }
}
