//! Finite-ε stationary-phase functionals in one variable.
//!
//! The objects here approximate the Dirac measure concentrated on the
//! critical points of a smooth objective f. The workhorse is the "halved"
//! integral ε^{−1/2} ∫ e^{i f(x)/ε} O(x) dx, evaluated with Gaussian damping
//! around the critical point and extrapolated η → 0; its squared modulus is
//! the pairing against g = |O|², which converges as ε → 0 to
//! 2π · Σ_{x*} g(x*)/|f″(x*)| — the value [`critical_point_oracle`]
//! computes directly by root finding.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numerics::{
    damped_quadrature, extrapolate_levels, find_critical_points, CriticalPoint, DampedLevels,
    DampedOscillatoryIntegrand, RegularizationParams,
};

/// Half-width of the 1-D integration window, in units of the Fresnel-zone
/// scale √(2πε/|f″|) at the critical point.
const WINDOW_ZONES: f64 = 50.0;
/// The weakest damping level satisfies η·R² = 36, so the envelope reaches
/// e^{−36} ≈ 2·10⁻¹⁶ at the window edge and truncation is below roundoff.
const EDGE_SUPPRESSION: f64 = 36.0;
/// Newton seed count for critical-point searches.
const ROOT_SEEDS: usize = 48;
/// Highest polynomial degree accepted by [`ScalarObjective::polynomial`].
const MAX_POLY_DEGREE: usize = 6;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A smooth real objective f with closed-form first and second derivatives,
/// together with the interval its critical points are searched in.
#[derive(Clone)]
pub struct ScalarObjective {
    f: RealFn,
    df: RealFn,
    d2f: RealFn,
    window: (f64, f64),
}

impl std::fmt::Debug for ScalarObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarObjective")
            .field("window", &self.window)
            .finish_non_exhaustive()
    }
}

impl std::fmt::Debug for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observable").finish_non_exhaustive()
    }
}

impl ScalarObjective {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        window: (f64, f64),
    ) -> Result<Self> {
        let (a, b) = window;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!(
                "search window must be a finite nonempty interval, got ({a}, {b})"
            )));
        }
        Ok(Self {
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
            window,
        })
    }

    /// Objective from polynomial coefficients (constant term first), up to
    /// degree 6. Derivatives are formed symbolically, so they are exact.
    pub fn polynomial(coeffs: &[f64], window: (f64, f64)) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_POLY_DEGREE + 1 {
            return Err(Error::InvalidParameter(format!(
                "polynomial objectives support degrees 0..={MAX_POLY_DEGREE}, got {} coefficients",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "polynomial coefficients must be finite".into(),
            ));
        }
        let c0 = coeffs.to_vec();
        let c1 = poly_derivative(&c0);
        let c2 = poly_derivative(&c1);
        Self::new(
            move |x| poly_eval(&c0, x),
            move |x| poly_eval(&c1, x),
            move |x| poly_eval(&c2, x),
            window,
        )
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn slope(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    pub fn curvature(&self, x: f64) -> f64 {
        (self.d2f)(x)
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// The same objective with a constant added to f; derivatives are
    /// untouched, so the critical points do not move.
    pub fn shifted(&self, offset: f64) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |x| f(x) + offset),
            df: self.df.clone(),
            d2f: self.d2f.clone(),
            window: self.window,
        }
    }

    /// Worst scaled deviation between the stored derivatives and central
    /// finite differences of f over the given points. "Scaled" means the
    /// deviation at x is divided by 1 + |derivative(x)|, so the measure stays
    /// meaningful near zeros of the derivative.
    pub fn derivative_deviation(&self, points: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for &x in points {
            let h1 = 1e-6 * (1.0 + x.abs());
            let fd1 = ((self.f)(x + h1) - (self.f)(x - h1)) / (2.0 * h1);
            let d1 = (self.df)(x);
            worst = worst.max((fd1 - d1).abs() / (1.0 + d1.abs()));

            let h2 = 1e-4 * (1.0 + x.abs());
            let fd2 =
                ((self.f)(x + h2) - 2.0 * (self.f)(x) + (self.f)(x - h2)) / (h2 * h2);
            let d2 = (self.d2f)(x);
            worst = worst.max((fd2 - d2).abs() / (1.0 + d2.abs()));
        }
        worst
    }

    fn critical_points(&self) -> Result<Vec<CriticalPoint>> {
        let df = self.df.clone();
        let d2f = self.d2f.clone();
        find_critical_points(move |x| df(x), move |x| d2f(x), self.window, ROOT_SEEDS)
    }

    /// The single critical point required by the halved form, `None` when f
    /// has no critical point in the window (the integral is then
    /// exponentially small rather than an error).
    fn lone_critical_point(&self) -> Result<Option<CriticalPoint>> {
        let pts = self.critical_points()?;
        match pts.len() {
            0 => Ok(None),
            1 => Ok(Some(pts[0])),
            n => Err(Error::MultipleCriticalPoints { count: n }),
        }
    }
}

/// The test function paired against the delta functional — g(x) in the
/// pairing, or the half-weight O(x) whose squared modulus is g.
#[derive(Clone)]
pub struct Observable {
    g: ComplexFn,
}

impl Observable {
    pub fn new(g: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self { g: Arc::new(g) }
    }

    pub fn real(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(move |x| C64::new(g(x), 0.0))
    }

    /// The constant observable 1.
    pub fn unit() -> Self {
        Self::new(|_| C64::new(1.0, 0.0))
    }

    pub fn evaluate(&self, x: f64) -> C64 {
        (self.g)(x)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    Ok(())
}

/// Damping geometry for the halved form: window center, half-width, and the
/// weakest damping strength.
fn halved_geometry(
    objective: &ScalarObjective,
    epsilon: f64,
) -> Result<(f64, f64, f64)> {
    match objective.lone_critical_point()? {
        Some(cp) => {
            let zone = (2.0 * PI * epsilon / cp.curvature.abs()).sqrt();
            let r = WINDOW_ZONES * zone;
            Ok((cp.location, r, EDGE_SUPPRESSION / (r * r)))
        }
        None => {
            // No stationary point: the integral is dominated by the endpoint
            // behaviour of the damping, and any window-scale choice sees the
            // same exponentially small value.
            let (a, b) = objective.window();
            let r = 0.5 * (b - a);
            Ok((0.5 * (a + b), r, EDGE_SUPPRESSION / (r * r)))
        }
    }
}

/// The halved stationary-phase integral ε^{−1/2} ∫ e^{i f(x)/ε} O(x) dx,
/// evaluated once per damping level. Requires at most one critical point in
/// the objective's window; with none, the value is exponentially small.
pub fn halved_delta_levels(
    objective: &ScalarObjective,
    observable: &Observable,
    epsilon: f64,
    reg: &RegularizationParams,
) -> Result<DampedLevels> {
    check_epsilon(epsilon)?;
    let (center, r, eta_min) = halved_geometry(objective, epsilon)?;
    let etas = reg.eta.resolve(eta_min)?;
    let window = (center - r, center + r);
    let scale = 1.0 / epsilon.sqrt();

    let mut values = Vec::with_capacity(etas.len());
    for &eta in &etas {
        let f = objective.f.clone();
        let g = observable.g.clone();
        let integrand = DampedOscillatoryIntegrand::new(
            move |x| f(x) / epsilon,
            move |x| g(x),
            eta,
            center,
        );
        values.push(damped_quadrature(&integrand, window, reg.step_budget)? * scale);
    }
    let extrapolated = extrapolate_levels(&etas, &values)?;
    Ok(DampedLevels {
        etas,
        values,
        extrapolated,
    })
}

/// The η → 0 limit of [`halved_delta_levels`].
pub fn halved_delta(
    objective: &ScalarObjective,
    observable: &Observable,
    epsilon: f64,
    reg: &RegularizationParams,
) -> Result<C64> {
    Ok(halved_delta_levels(objective, observable, epsilon, reg)?.extrapolated)
}

/// Per-level pairing values: the squared modulus of the halved integral at
/// each damping level. The pairing is real, so every entry has zero
/// imaginary part.
pub fn delta_pairing_levels(
    objective: &ScalarObjective,
    observable: &Observable,
    epsilon: f64,
    reg: &RegularizationParams,
) -> Result<DampedLevels> {
    let halved = halved_delta_levels(objective, observable, epsilon, reg)?;
    let values: Vec<C64> = halved
        .values
        .iter()
        .map(|v| C64::new(v.norm_sqr(), 0.0))
        .collect();
    let extrapolated = extrapolate_levels(&halved.etas, &values)?;
    Ok(DampedLevels {
        etas: halved.etas,
        values,
        extrapolated,
    })
}

/// The pairing ⟨δ_f | g⟩ at finite ε with g = |O|², computed as the squared
/// modulus of the halved integral and extrapolated η → 0.
pub fn delta_pairing(
    objective: &ScalarObjective,
    observable: &Observable,
    epsilon: f64,
    reg: &RegularizationParams,
) -> Result<C64> {
    Ok(delta_pairing_levels(objective, observable, epsilon, reg)?.extrapolated)
}

/// Pairing extrapolated ε → 0 over a halving ladder of ε values (coarsest
/// first), removing the leading finite-ε error.
pub fn pairing_over_epsilons(
    objective: &ScalarObjective,
    observable: &Observable,
    epsilons: &[f64],
    reg: &RegularizationParams,
) -> Result<C64> {
    let mut values = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        values.push(delta_pairing(objective, observable, eps, reg)?);
    }
    extrapolate_levels(epsilons, &values)
}

/// Direct two-dimensional evaluation of the pairing as the double integral
/// ε^{−1} ∬ e^{i(f(y) − f(x))/ε} g(x) dx dy over one shared window, with
/// Gaussian damping on both axes. This is the asymptotic cross-check route:
/// it converges to the same limit as [`delta_pairing`] for objectives with a
/// single critical point, at quadratic cost in the node count.
///
/// With several critical points the finite-ε value retains their
/// interference; with none it is exponentially small.
pub fn classical_delta_direct(
    objective: &ScalarObjective,
    observable: &Observable,
    epsilon: f64,
    reg: &RegularizationParams,
) -> Result<C64> {
    check_epsilon(epsilon)?;
    let pts = objective.critical_points()?;

    // Window and damping: cover every critical point, leave room for the
    // local Fresnel-zone scale, and keep the weakest damping resolvable on
    // the same grid as the phase.
    let (center, r, eta_min) = if pts.is_empty() {
        let (a, b) = objective.window();
        let r = 0.5 * (b - a);
        (0.5 * (a + b), r, EDGE_SUPPRESSION / (r * r))
    } else {
        let a_min = pts
            .iter()
            .map(|p| p.curvature.abs() / (2.0 * epsilon))
            .fold(f64::INFINITY, f64::min);
        let eta_min = a_min / 16.0;
        let zone_max = pts
            .iter()
            .map(|p| (2.0 * PI * epsilon / p.curvature.abs()).sqrt())
            .fold(0.0f64, f64::max);
        let lo = pts.iter().map(|p| p.location).fold(f64::INFINITY, f64::min);
        let hi = pts
            .iter()
            .map(|p| p.location)
            .fold(f64::NEG_INFINITY, f64::max);
        let margin = (12.0 * zone_max).max(3.0 / eta_min.sqrt());
        (0.5 * (lo + hi), 0.5 * (hi - lo) + margin, eta_min)
    };
    let etas = reg.eta.resolve(eta_min)?;
    let (a, b) = (center - r, center + r);

    // Node count per axis from the phase-resolution rule; the step budget
    // caps the total number of grid cells, which is what actually costs.
    let mut max_slope = 0.0f64;
    for k in 0..513 {
        let x = a + (b - a) * (k as f64) / 512.0;
        max_slope = max_slope.max(objective.slope(x).abs() / epsilon);
    }
    let n_axis = (((b - a) * max_slope / (PI / 8.0)).ceil() as usize)
        .next_multiple_of(2)
        .max(16);
    let cells = (n_axis + 1) * (n_axis + 1);
    if cells > reg.step_budget {
        return Err(Error::BudgetExceeded {
            required: cells,
            budget: reg.step_budget,
        });
    }

    let h = (b - a) / n_axis as f64;
    let mut values = Vec::with_capacity(etas.len());
    for &eta in &etas {
        // Per-axis factors of the integrand; the 2-D sum below runs over
        // their product grid cell by cell.
        let mut col = Vec::with_capacity(n_axis + 1); // g(x)·w·damp·e^{−iφ(x)}
        let mut row = Vec::with_capacity(n_axis + 1); // w·damp·e^{+iφ(y)}
        for k in 0..=n_axis {
            let x = if k == n_axis { b } else { a + h * k as f64 };
            let w = if k == 0 || k == n_axis {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let d = x - center;
            let damp = (-eta * d * d).exp();
            let phase = objective.value(x) / epsilon;
            let gx = observable.evaluate(x);
            if !phase.is_finite() || !gx.re.is_finite() || !gx.im.is_finite() {
                return Err(Error::NonFiniteIntegrand { x });
            }
            let wd = w * damp;
            col.push(gx * C64::from_polar(wd, -phase));
            row.push(C64::from_polar(wd, phase));
        }
        let mut acc = C64::new(0.0, 0.0);
        for py in &row {
            for px in &col {
                acc += px * py;
            }
        }
        values.push(acc * (h * h / 9.0) / epsilon);
    }
    extrapolate_levels(&etas, &values)
}

/// The limiting value the finite-ε routes approach: 2π · Σ_{x*} g(x*)/|f″(x*)|
/// over the critical points of f in `window`, located by root finding. The
/// pairing of a real test function is real; the real part of g is used.
pub fn critical_point_oracle(
    objective: &ScalarObjective,
    observable: &Observable,
    window: (f64, f64),
) -> Result<f64> {
    let df = objective.df.clone();
    let d2f = objective.d2f.clone();
    let pts = find_critical_points(move |x| df(x), move |x| d2f(x), window, ROOT_SEEDS)?;
    Ok(pts
        .iter()
        .map(|p| 2.0 * PI * observable.evaluate(p.location).re / p.curvature.abs())
        .sum())
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    if coeffs.len() <= 1 {
        return vec![0.0];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}
