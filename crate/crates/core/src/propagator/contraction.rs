//! Damped oscillatory quadrature over the interior points of a sliced path,
//! organized as sequential slice contraction.
//!
//! The integrand e^{iS_n/h}·∏e^{−η(x_i−c_i)²} factorizes over
//! nearest-neighbor slices, so the tensor-product Simpson sum collapses to a
//! chain of vector–matrix products: O(n·N²) work instead of O(Nⁿ), with the
//! same arithmetic content. Every axis shares one node layout — spacing,
//! count, and offsets — centered on the discrete classical path, so each
//! kinetic factor depends only on the node-index difference and is
//! precomputed once.

use crate::error::{Error, Result};
use crate::lattice::{classical_path_solve, LagrangianSpec, LatticeConfig};
use crate::numerics::{EtaLadder, RegularizationParams};
use num_complex::Complex64 as C64;

/// At most this much phase advance per grid step (radians).
const MAX_PHASE_PER_STEP: f64 = std::f64::consts::PI / 8.0;
/// Damping exponent at the window edge for the weakest ladder level:
/// e^{−16} ≈ 1.1·10⁻⁷ keeps truncation far below the 10⁻³/10⁻⁴ contracts.
const EDGE_SUPPRESSION: f64 = 16.0;
/// The weakest damping is the softest kinetic curvature over this factor,
/// so even the strongest ladder level only perturbs the Gaussian widths.
const DAMPING_MARGIN: f64 = 16.0;
/// A quartic term turns the sliced action's large-|x| branch around, creating
/// spurious stationary points at |x|² ≈ a_min·h/(2|λ|ε′) per interior
/// coordinate. They are fold-degenerate (the Hessian determinant vanishes
/// there), so their contribution decays only like e^{−η·Σx²} with an O(10)
/// caustic enhancement instead of being quadrature-small. Keeping
/// η·Σ_eff ≥ this guard on every auto ladder level pins that contamination
/// below the damping series' own extrapolation error.
const SADDLE_GUARD: f64 = 11.0;
const MIN_INTERVALS: usize = 16;

/// Optional per-axis factor inserted into the slice integral: `(site, g)`
/// multiplies the integrand by g(x_site), with sites numbered 1..=n.
pub(super) type Insertion<'a> = (usize, &'a dyn Fn(f64) -> f64);

/// Grids, phase factors, and the damping ladder for one slicing problem.
/// Construction does all η-independent work (classical path, node layout,
/// kinetic factor tables); [`SliceEngine::contract`] then evaluates the
/// damped sum for one η and one optional insertion.
pub(super) struct SliceEngine {
    config: LatticeConfig,
    /// Damping centers: the discrete classical path interior, length n.
    centers: Vec<f64>,
    /// Node offsets (k − N/2)·Δ shared by every axis; exactly antisymmetric
    /// about the center, which parity cancellations rely on.
    offsets: Vec<f64>,
    /// Damping ladder, largest first.
    etas: Vec<f64>,
    /// Per-axis local phase factors: weight × e^{−iε′V/h} (axis 1 also
    /// carries the left-boundary slice), indexed [axis-1][node].
    local: Vec<Vec<C64>>,
    /// Right-boundary kinetic factor on the last axis.
    final_factor: Vec<C64>,
    /// Kinetic factors between adjacent axes by node-index difference,
    /// indexed [slice][k' − k + N].
    kinetic: Vec<Vec<C64>>,
}

impl SliceEngine {
    pub(super) fn new(
        lagrangian: &LagrangianSpec,
        config: LatticeConfig,
        h: f64,
        reg: &RegularizationParams,
    ) -> Result<Self> {
        if config.n == 0 {
            return Err(Error::InvalidParameter(
                "slice contraction needs at least one interior point".into(),
            ));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quantum scale must be positive and finite, got {h}"
            )));
        }
        let n = config.n;
        let eps = config.eps_prime();
        let m = lagrangian.mass();

        let path = classical_path_solve(lagrangian, config)?;
        let centers: Vec<f64> = path.interior().to_vec();

        // Softest curvature of the kinetic quadratic form (its smallest
        // eigenvalue scale) fixes the weakest damping and hence the window.
        let a_min = m / (h * eps) * (1.0 - (std::f64::consts::PI / (n + 1) as f64).cos());

        // Auto ladders respect two geometric bounds. The floor keeps the
        // spurious quartic saddles suppressed (see SADDLE_GUARD); the cap
        // keeps the strongest level at or below the softest curvature, since
        // damping past that point distorts the very widths being extrapolated.
        // Explicit ladders are taken as given: callers matching ladders across
        // runs (e.g. to difference two couplings) need them untouched.
        let mut floor = a_min / DAMPING_MARGIN;
        let lambda = lagrangian.lambda();
        if lambda != 0.0 {
            let saddle_sq = a_min * h / (2.0 * lambda.abs() * eps);
            let sigma_eff = saddle_sq * (n as f64 + 1.0) / 2.0;
            floor = floor.max(SADDLE_GUARD / sigma_eff);
        }
        let etas = match &reg.eta {
            EtaLadder::Auto { levels } => {
                if *levels < 2 {
                    return Err(Error::LadderTooShort { len: *levels });
                }
                let allowed = ((a_min / floor).log2().floor().max(0.0) as usize) + 1;
                let used = (*levels).min(allowed);
                if used >= 2 {
                    EtaLadder::Auto { levels: used }.resolve(floor)?
                } else {
                    // So strongly coupled that only one admissible level
                    // remains; the caller sees the collapsed ladder in the
                    // returned levels and can supply an explicit one instead.
                    vec![floor]
                }
            }
            explicit => explicit.resolve(floor)?,
        };
        let eta_min = *etas.last().expect("resolve returns at least one level");
        let radius = (EDGE_SUPPRESSION / eta_min).sqrt();

        // Phase-slope bound over the whole box: the kinetic second
        // difference plus the potential slope at the outermost node.
        let curvature_gap = (1..=n)
            .map(|i| (2.0 * path.node(i) - path.node(i - 1) - path.node(i + 1)).abs())
            .fold(0.0f64, f64::max);
        let x_max = centers.iter().fold(0.0f64, |acc, c| acc.max(c.abs())) + radius;
        let slope_potential = m * lagrangian.omega() * lagrangian.omega() * x_max
            + 4.0 * lagrangian.lambda().abs() * x_max * x_max * x_max;
        let slope = (m / eps * (4.0 * radius + curvature_gap) + eps * slope_potential) / h;
        let max_step = MAX_PHASE_PER_STEP / slope;

        let mut intervals = ((2.0 * radius / max_step).ceil() as usize).max(MIN_INTERVALS);
        intervals += intervals % 2;
        if intervals > reg.step_budget {
            return Err(Error::BudgetExceeded {
                required: intervals,
                budget: reg.step_budget,
            });
        }
        let spacing = 2.0 * radius / intervals as f64;
        let half = (intervals / 2) as f64;
        let offsets: Vec<f64> = (0..=intervals)
            .map(|k| (k as f64 - half) * spacing)
            .collect();
        let weights: Vec<f64> = (0..=intervals)
            .map(|k| {
                let w = if k == 0 || k == intervals {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * spacing / 3.0
            })
            .collect();

        let kinetic_phase = |d: f64| m * d * d / (2.0 * eps * h);
        let check = |value: C64, x: f64| -> Result<C64> {
            if value.re.is_finite() && value.im.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFiniteIntegrand { x })
            }
        };

        // Axis-local factors: Simpson weight and the slice potential at the
        // left node; axis 1 additionally carries the whole first slice
        // (kinetic from φ₀ plus the potential at φ₀).
        let mut local = Vec::with_capacity(n);
        for (i, &c) in centers.iter().enumerate() {
            let mut row = Vec::with_capacity(offsets.len());
            for (k, &o) in offsets.iter().enumerate() {
                let x = c + o;
                let mut phase = -eps * lagrangian.potential(x) / h;
                if i == 0 {
                    phase += (kinetic_phase(x - config.phi0))
                        - eps * lagrangian.potential(config.phi0) / h;
                }
                row.push(check(C64::from_polar(weights[k], phase), x)?);
            }
            local.push(row);
        }
        let final_factor: Vec<C64> = offsets
            .iter()
            .map(|&o| {
                let x = centers[n - 1] + o;
                check(C64::from_polar(1.0, kinetic_phase(config.phi1 - x)), x)
            })
            .collect::<Result<_>>()?;

        let mut kinetic = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n - 1 {
            let gap = centers[i + 1] - centers[i];
            let row: Vec<C64> = (0..=2 * intervals)
                .map(|j| {
                    let d = gap + (j as f64 - intervals as f64) * spacing;
                    check(C64::from_polar(1.0, kinetic_phase(d)), d)
                })
                .collect::<Result<_>>()?;
            kinetic.push(row);
        }

        Ok(Self {
            config,
            centers,
            offsets,
            etas,
            local,
            final_factor,
            kinetic,
        })
    }

    pub(super) fn etas(&self) -> &[f64] {
        &self.etas
    }

    /// Damped Simpson sum of e^{iS_n/h} (times the insertion, if any) over
    /// the interior grid at damping `eta`. No normalization prefactor.
    ///
    /// The final reduction adds mirror-node pairs first: when the integrand
    /// is exactly odd under o → −o (symmetric boundaries, odd insertion),
    /// every pair cancels bitwise and the sum is exactly zero.
    pub(super) fn contract(&self, eta: f64, insertion: Option<Insertion>) -> Result<C64> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must be positive and finite, got {eta}"
            )));
        }
        if let Some((site, _)) = insertion {
            if site == 0 || site > self.config.n {
                return Err(Error::InvalidParameter(format!(
                    "insertion site must lie in 1..={}, got {site}",
                    self.config.n
                )));
            }
        }
        let n = self.config.n;
        let count = self.offsets.len();
        let damp: Vec<f64> = self.offsets.iter().map(|&o| (-eta * o * o).exp()).collect();

        let mut psi: Vec<C64> = (0..count)
            .map(|k| self.local[0][k] * damp[k])
            .collect();
        if let Some((1, g)) = insertion {
            for (k, value) in psi.iter_mut().enumerate() {
                *value *= g(self.centers[0] + self.offsets[k]);
            }
        }

        for axis in 2..=n {
            let ker = &self.kinetic[axis - 2];
            let prev = psi;
            let mut next = Vec::with_capacity(count);
            let mid = (count - 1) / 2;
            for target in 0..count {
                // Mirror-paired accumulation (k' − k + N runs from target + N
                // down to target): when prev is exactly odd or even under
                // k → count−1−k, the sum at the mirrored target accumulates
                // the exact negations/duplicates of these pairs in the same
                // order, so parity survives the chain bitwise.
                let mut acc = C64::new(0.0, 0.0);
                let base = target + count - 1;
                for k in 0..mid {
                    acc += prev[k] * ker[base - k] + prev[count - 1 - k] * ker[target + k];
                }
                acc += prev[mid] * ker[target + mid];
                let mut value = acc * self.local[axis - 1][target] * damp[target];
                if let Some((site, g)) = insertion {
                    if site == axis {
                        value *= g(self.centers[axis - 1] + self.offsets[target]);
                    }
                }
                next.push(value);
            }
            psi = next;
        }

        let term = |k: usize| psi[k] * self.final_factor[k];
        let mid = (count - 1) / 2;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..mid {
            acc += term(k) + term(count - 1 - k);
        }
        acc += term(mid);
        if !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(Error::NonFiniteIntegrand {
                x: self.centers[n - 1],
            });
        }
        Ok(acc)
    }
}
