//! Composite Simpson quadrature for damped oscillatory integrands of the
//! form g(x) · exp(i φ(x)) · exp(−η (x − c)²).
//!
//! The node count is taken from the caller's step budget; a resolution rule
//! (at least 16 nodes per phase period, i.e. spacing ≤ (π/8)/max|φ′|) is
//! enforced as a hard check so an under-budgeted oscillatory integral fails
//! loudly instead of returning an aliased value.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Minimum interval count accepted by [`damped_quadrature`].
const MIN_INTERVALS: usize = 16;
/// Node spacing must not exceed (π/8) / max|φ′|.
const PHASE_RESOLUTION: f64 = PI / 8.0;
/// Sample count for estimating max|φ′| over the window.
const SLOPE_SAMPLES: usize = 513;

type Phase = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type Amplitude = Box<dyn Fn(f64) -> C64 + Send + Sync>;

/// An integrand g(x) · e^{iφ(x)} · e^{−η(x−c)²}, kept in factored form so
/// the quadrature can inspect the phase separately from the envelope.
pub struct DampedOscillatoryIntegrand {
    phase: Phase,
    amplitude: Amplitude,
    eta: f64,
    center: f64,
}

impl DampedOscillatoryIntegrand {
    pub fn new(
        phase: impl Fn(f64) -> f64 + Send + Sync + 'static,
        amplitude: impl Fn(f64) -> C64 + Send + Sync + 'static,
        eta: f64,
        center: f64,
    ) -> Self {
        Self {
            phase: Box::new(phase),
            amplitude: Box::new(amplitude),
            eta,
            center,
        }
    }

    /// Pure phase factor: g ≡ 1.
    pub fn unit_amplitude(
        phase: impl Fn(f64) -> f64 + Send + Sync + 'static,
        eta: f64,
        center: f64,
    ) -> Self {
        Self::new(phase, |_| C64::new(1.0, 0.0), eta, center)
    }

    /// Real-valued amplitude g(x).
    pub fn real_amplitude(
        phase: impl Fn(f64) -> f64 + Send + Sync + 'static,
        amplitude: impl Fn(f64) -> f64 + Send + Sync + 'static,
        eta: f64,
        center: f64,
    ) -> Self {
        Self::new(phase, move |x| C64::new(amplitude(x), 0.0), eta, center)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn phase_at(&self, x: f64) -> f64 {
        (self.phase)(x)
    }

    /// Full integrand value at `x`, damping included.
    pub fn evaluate(&self, x: f64) -> C64 {
        let d = x - self.center;
        let damp = (-self.eta * d * d).exp();
        (self.amplitude)(x) * C64::from_polar(damp, (self.phase)(x))
    }
}

/// Integrate `integrand` over `window` with composite Simpson on
/// `step_budget` intervals (rounded down to even).
///
/// Fails with `BudgetExceeded` when the sampled phase slope demands more
/// intervals than the budget provides, and with `NonFiniteIntegrand` when
/// any sample is NaN or infinite.
pub fn damped_quadrature(
    integrand: &DampedOscillatoryIntegrand,
    window: (f64, f64),
    step_budget: usize,
) -> Result<C64> {
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!(
            "integration window must be a finite nonempty interval, got ({a}, {b})"
        )));
    }
    if !(integrand.eta.is_finite() && integrand.eta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "damping strength must be finite and nonnegative, got {}",
            integrand.eta
        )));
    }
    if !integrand.center.is_finite() {
        return Err(Error::InvalidParameter(
            "damping center must be finite".into(),
        ));
    }
    if step_budget < MIN_INTERVALS {
        return Err(Error::InvalidParameter(format!(
            "step budget {step_budget} is below the minimum of {MIN_INTERVALS}"
        )));
    }
    let n = step_budget & !1;
    let span = b - a;

    // Resolution check: sample |φ′| by central differences and demand the
    // grid resolve the fastest oscillation.
    let delta = span * 1e-7;
    let mut max_slope = 0.0f64;
    for k in 0..SLOPE_SAMPLES {
        let x = a + span * (k as f64) / ((SLOPE_SAMPLES - 1) as f64);
        let lo = (x - delta).max(a);
        let hi = (x + delta).min(b);
        let slope = (integrand.phase_at(hi) - integrand.phase_at(lo)) / (hi - lo);
        if !slope.is_finite() {
            return Err(Error::NonFiniteIntegrand { x });
        }
        max_slope = max_slope.max(slope.abs());
    }
    if max_slope > 0.0 {
        let required = (span * max_slope / PHASE_RESOLUTION).ceil();
        if required > n as f64 {
            return Err(Error::BudgetExceeded {
                required: required as usize,
                budget: step_budget,
            });
        }
    }

    // Composite Simpson: weights 1, 4, 2, 4, ..., 4, 1 over n intervals.
    // Nodes are generated as exact mirror pairs mid ± j·h and each pair is
    // summed before accumulation, so an integrand odd about the midpoint
    // cancels bitwise instead of leaving left-to-right rounding residue.
    let h = span / n as f64;
    let mid = 0.5 * (a + b);
    let half = n / 2;
    let eval = |x: f64| -> Result<C64> {
        let v = integrand.evaluate(x);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteIntegrand { x });
        }
        Ok(v)
    };
    // Midpoint node has index n/2; its mirror partners at indices n/2 ∓ j
    // share a weight because they share parity.
    let mut acc = eval(mid)? * if half % 2 == 1 { 4.0 } else { 2.0 };
    for j in 1..=half {
        let k = half - j;
        let w = if k == 0 {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let u = h * j as f64;
        acc += (eval(mid - u)? + eval(mid + u)?) * w;
    }
    Ok(acc * (h / 3.0))
}
