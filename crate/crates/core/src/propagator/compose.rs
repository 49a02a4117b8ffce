//! Kernel composition over an intermediate point:
//! (a∘b)(φ₀, φ₂) = ∫ a(φ₀, x)·b(x, φ₂) dx, the semigroup law of exact
//! propagators, evaluated by damped quadrature with η-ladder extrapolation.

use crate::error::{Error, Result};
use crate::numerics::{
    damped_quadrature, extrapolate_levels, DampedOscillatoryIntegrand, RegularizationParams,
};
use num_complex::Complex64 as C64;
use std::sync::Arc;

/// Damping exponent at the window edge for the weakest ladder level.
const EDGE_SUPPRESSION: f64 = 16.0;

type KernelFn = Arc<dyn Fn(f64, f64) -> Result<C64> + Send + Sync>;

/// A kernel with its time interval attached: a complex amplitude for
/// propagating from the first argument at `t0` to the second at `t1`.
#[derive(Clone)]
pub struct TimedKernel {
    kernel: KernelFn,
    t0: f64,
    t1: f64,
}

impl std::fmt::Debug for TimedKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimedKernel")
            .field("t0", &self.t0)
            .field("t1", &self.t1)
            .finish_non_exhaustive()
    }
}

impl TimedKernel {
    pub fn new(
        t0: f64,
        t1: f64,
        kernel: impl Fn(f64, f64) -> Result<C64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidParameter(format!(
                "kernel interval must be ordered and finite, got [{t0}, {t1}]"
            )));
        }
        Ok(Self {
            kernel: Arc::new(kernel),
            t0,
            t1,
        })
    }

    /// The closed-form free kernel on [t0, t1].
    pub fn free_oracle(m: f64, h: f64, t0: f64, t1: f64) -> Result<Self> {
        super::oracle_free_kernel(m, h, 0.0, 0.0, t1 - t0)?;
        Self::new(t0, t1, move |a, b| {
            super::oracle_free_kernel(m, h, a, b, t1 - t0)
        })
    }

    /// The closed-form harmonic kernel on [t0, t1].
    pub fn harmonic_oracle(m: f64, omega: f64, h: f64, t0: f64, t1: f64) -> Result<Self> {
        super::oracle_harmonic_kernel(m, omega, h, 0.0, 0.0, t1 - t0)?;
        Self::new(t0, t1, move |a, b| {
            super::oracle_harmonic_kernel(m, omega, h, a, b, t1 - t0)
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn evaluate(&self, from: f64, to: f64) -> Result<C64> {
        (self.kernel)(from, to)
    }
}

/// Compose two kernels over their shared intermediate time: the returned
/// kernel integrates left(φ₀, x)·right(x, φ₂) over `quad_window` with the
/// damping ladder from `reg`, extrapolated to η → 0. The window must cover
/// the stationary intermediate point with room for the damping to die off;
/// the weakest damping is sized so the window edge is suppressed by e^{−16}.
pub fn compose_kernels(
    left: &TimedKernel,
    right: &TimedKernel,
    quad_window: (f64, f64),
    reg: &RegularizationParams,
) -> Result<TimedKernel> {
    let joint_scale = left.t1.abs().max(right.t0.abs()).max(1.0);
    if (left.t1 - right.t0).abs() > 1e-12 * joint_scale {
        return Err(Error::InvalidParameter(format!(
            "kernels do not share an intermediate time: left ends at {}, right starts at {}",
            left.t1, right.t0
        )));
    }
    let (lo, hi) = quad_window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "quadrature window must be ordered and finite, got [{lo}, {hi}]"
        )));
    }
    let center = 0.5 * (lo + hi);
    let half_width = 0.5 * (hi - lo);
    let etas = reg.eta.resolve(EDGE_SUPPRESSION / (half_width * half_width))?;
    let left_kernel = Arc::clone(&left.kernel);
    let right_kernel = Arc::clone(&right.kernel);
    let budget = reg.step_budget;

    TimedKernel::new(left.t0, right.t1, move |from, to| {
        let mut values = Vec::with_capacity(etas.len());
        for &eta in &etas {
            let left_kernel = Arc::clone(&left_kernel);
            let right_kernel = Arc::clone(&right_kernel);
            // The kernels' oscillation lives in the amplitude; an inner
            // error is surfaced through the integrand finiteness check.
            let integrand = DampedOscillatoryIntegrand::new(
                |_| 0.0,
                move |x| {
                    let product = left_kernel(from, x)
                        .and_then(|a| right_kernel(x, to).map(|b| a * b));
                    product.unwrap_or(C64::new(f64::NAN, f64::NAN))
                },
                eta,
                center,
            );
            values.push(damped_quadrature(&integrand, (lo, hi), budget)?);
        }
        extrapolate_levels(&etas, &values)
    })
}
