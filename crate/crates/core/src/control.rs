//! Bipartition ladders over the slice width and the bookkeeping of the three
//! kernel series — bare, renormalized, dressed.
//!
//! The slice width is driven to zero by exact halving: level k uses
//! n_k = (n₀+1)·2^k − 1 interior points, so ε′_k = ε′₀/2^k holds to the last
//! bit and Richardson extrapolation applies without ratio drift. A ladder
//! evaluates one kernel per level under a scale policy ([`SeriesKind`]), and
//! [`convergence_report`] condenses the result against an oracle reference
//! into per-level errors, an observed order, and the extrapolated limit.

use crate::error::{Error, Result};
use crate::lattice::{LagrangianKind, LatticeConfig};
use crate::numerics::{
    estimate_convergence_order, richardson_extrapolate, ExtrapolationLadder,
    RegularizationParams,
};
use crate::propagator::{lattice_kernel_exact, lattice_kernel_quadrature, KernelSpec};
use num_complex::Complex64 as C64;

/// Deepest supported bipartition ladder; beyond this the interior count
/// overflows any practical budget (and eventually the integer type).
const MAX_LEVELS: usize = 40;
/// Errors at or below this relative size count as "already converged",
/// where an order estimate would only fit noise.
const FLAT_TOL: f64 = 1e-12;

/// Scale policy of a kernel series: what plays the quantum scale at each
/// bipartition level.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesKind {
    /// Independent phase and time units: level k weighs the action with
    /// scale ε_k/ε′_k, so the caller supplies one ε per level. Imposing
    /// ε_k = h·ε′_k collapses this onto the renormalized series.
    Bare { epsilons: Vec<f64> },
    /// One fixed quantum scale h at every level: the kernel series proper.
    Renormalized,
    /// Quantum scale rescaled to μ·h at every level.
    Dressed { mu: f64 },
}

/// A bipartition ladder: the series kind, the coarsest slicing, the number
/// of halvings, and the base quantum scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlLadder {
    pub kind: SeriesKind,
    pub base_config: LatticeConfig,
    pub levels: usize,
    pub h: f64,
}

impl ControlLadder {
    pub fn new(
        kind: SeriesKind,
        base_config: LatticeConfig,
        levels: usize,
        h: f64,
    ) -> Result<Self> {
        if levels < 2 {
            return Err(Error::LadderTooShort { len: levels });
        }
        if levels > MAX_LEVELS {
            return Err(Error::InvalidParameter(format!(
                "bipartition depth {levels} exceeds the supported {MAX_LEVELS}"
            )));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quantum scale must be positive and finite, got {h}"
            )));
        }
        match &kind {
            SeriesKind::Bare { epsilons } => {
                if epsilons.len() != levels {
                    return Err(Error::InvalidParameter(format!(
                        "bare series needs one epsilon per level: got {} for {levels} levels",
                        epsilons.len()
                    )));
                }
                if let Some(bad) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "bare epsilons must be positive and finite, got {bad}"
                    )));
                }
            }
            SeriesKind::Dressed { mu } => {
                if !(mu.is_finite() && *mu > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "scale factor must be positive and finite, got {mu}"
                    )));
                }
            }
            SeriesKind::Renormalized => {}
        }
        Ok(Self {
            kind,
            base_config,
            levels,
            h,
        })
    }

    /// The slicing at level k: interior count n_k = (n₀+1)·2^k − 1, which
    /// halves ε′ exactly (the divisor is the same integer scaled by 2^k).
    pub fn config_at(&self, level: usize) -> Result<LatticeConfig> {
        if level >= self.levels {
            return Err(Error::InvalidParameter(format!(
                "level {level} out of range for a {}-level ladder",
                self.levels
            )));
        }
        let n = (self.base_config.n + 1) * (1usize << level) - 1;
        Ok(LatticeConfig {
            n,
            ..self.base_config
        })
    }

    /// The quantum scale in force at level k under this ladder's kind.
    fn scale_at(&self, level: usize, eps_prime: f64) -> f64 {
        match &self.kind {
            SeriesKind::Bare { epsilons } => epsilons[level] / eps_prime,
            SeriesKind::Renormalized => self.h,
            SeriesKind::Dressed { mu } => self.h * mu,
        }
    }
}

/// Evaluate the kernel at every bipartition level and package the values
/// with their slice widths for extrapolation.
///
/// The ladder is the scale authority: its kind and h determine the quantum
/// scale at each level, while `spec` contributes the dynamics and the
/// normalization convention (its own h is not consulted). Quadratic
/// Lagrangians run through the closed-form route at any depth; the quartic
/// coupling runs through damped quadrature and is therefore limited to
/// levels with n ≤ 3.
pub fn run_ladder(ladder: &ControlLadder, spec: &KernelSpec) -> Result<ExtrapolationLadder> {
    // Revalidate: the fields are public, so a struct literal can bypass new().
    let ladder = ControlLadder::new(
        ladder.kind.clone(),
        ladder.base_config,
        ladder.levels,
        ladder.h,
    )?;
    let mut parameters = Vec::with_capacity(ladder.levels);
    let mut values = Vec::with_capacity(ladder.levels);
    for level in 0..ladder.levels {
        let config = ladder.config_at(level)?;
        let eps = config.eps_prime();
        let level_spec = KernelSpec::new(
            spec.lagrangian,
            ladder.scale_at(level, eps),
            spec.normalization,
        )?;
        let kernel = match spec.lagrangian.kind() {
            LagrangianKind::Quartic => {
                lattice_kernel_quadrature(&level_spec, config, &RegularizationParams::default())?
            }
            _ => lattice_kernel_exact(&level_spec, config)?,
        };
        parameters.push(eps);
        values.push(kernel.value);
    }
    ExtrapolationLadder::new(parameters, values)
}

/// One scale factor's worth of the invariance check: the kernel computed at
/// scale μ·h against the kernel of the action rescaled by 1/μ at scale h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedInvarianceEntry {
    pub mu: f64,
    /// Kernel at quantum scale μ·h.
    pub scaled_h: C64,
    /// Kernel of the 1/μ-rescaled action at the original scale h.
    pub rescaled_action: C64,
    /// |scaled_h − rescaled_action| / |scaled_h|.
    pub relative_deviation: f64,
}

/// The invariance check over a list of scale factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedInvarianceReport {
    pub entries: Vec<DressedInvarianceEntry>,
    pub max_deviation: f64,
}

/// Check, for each μ, that rescaling the quantum scale h → μ·h and
/// rescaling the action S → S/μ produce the same kernel: the two routes are
/// algebraically the weight e^{iS/(μh)} read two ways, so quadratic cases
/// must agree to rounding. Evaluation failures propagate; disagreement is
/// data, recorded per entry.
pub fn verify_dressed_invariance(
    spec: &KernelSpec,
    config: LatticeConfig,
    mu_list: &[f64],
) -> Result<DressedInvarianceReport> {
    if mu_list.is_empty() {
        return Err(Error::InvalidParameter(
            "invariance check needs at least one scale factor".into(),
        ));
    }
    let mut entries = Vec::with_capacity(mu_list.len());
    let mut max_deviation = 0.0f64;
    for &mu in mu_list {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive and finite, got {mu}"
            )));
        }
        let scaled_h = KernelSpec::new(spec.lagrangian, spec.h * mu, spec.normalization)?;
        let a = lattice_kernel_exact(&scaled_h, config)?.value;
        let rescaled =
            KernelSpec::new(spec.lagrangian.rescaled(mu)?, spec.h, spec.normalization)?;
        let b = lattice_kernel_exact(&rescaled, config)?.value;
        let relative_deviation = (a - b).norm() / a.norm();
        max_deviation = max_deviation.max(relative_deviation);
        entries.push(DressedInvarianceEntry {
            mu,
            scaled_h: a,
            rescaled_action: b,
            relative_deviation,
        });
    }
    Ok(DressedInvarianceReport {
        entries,
        max_deviation,
    })
}

/// One ladder level against the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel {
    pub level: usize,
    /// Slice width ε′ (or whatever parameter the ladder halves).
    pub parameter: f64,
    pub value: C64,
    /// |value − reference|.
    pub error: f64,
}

/// Summary of a ladder against an oracle reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<ConvergenceLevel>,
    /// Log-log slope of error against parameter; `None` when every level is
    /// already at the reference (a flat ladder has no order to measure).
    pub order: Option<f64>,
    /// Richardson limit at the rounded observed order; the finest raw value
    /// for flat ladders.
    pub limit: C64,
    /// |limit − reference|.
    pub extrapolated_error: f64,
    /// Errors strictly decrease and the extrapolated error stays within 10×
    /// the finest raw error (extrapolation did not destabilize).
    pub converged: bool,
}

/// Condense a ladder result against an oracle reference: per-level errors,
/// the observed convergence order, the Richardson limit at that order, and
/// a falsifiable converged flag.
pub fn convergence_report(
    ladder_result: &ExtrapolationLadder,
    reference: C64,
) -> Result<ConvergenceReport> {
    if ladder_result.len() < 2 {
        return Err(Error::LadderTooShort {
            len: ladder_result.len(),
        });
    }
    let scale = if reference.norm() > 0.0 {
        reference.norm()
    } else {
        1.0
    };
    let levels: Vec<ConvergenceLevel> = ladder_result
        .parameters
        .iter()
        .zip(&ladder_result.values)
        .enumerate()
        .map(|(level, (&parameter, &value))| ConvergenceLevel {
            level,
            parameter,
            value,
            error: (value - reference).norm(),
        })
        .collect();

    // Flat ladders (every level already at the reference) have no measurable
    // order and nothing to extrapolate.
    if levels.iter().all(|l| l.error <= FLAT_TOL * scale) {
        let finest = ladder_result.finest();
        return Ok(ConvergenceReport {
            extrapolated_error: (finest - reference).norm(),
            levels,
            order: None,
            limit: finest,
            converged: true,
        });
    }

    let order = estimate_convergence_order(ladder_result, reference)?;
    // A fractional or negative slope still gets a defined tableau: round to
    // the nearest supported leading power.
    let leading = (order.round() as i64).max(1) as usize;
    let limit = richardson_extrapolate(ladder_result, leading)?;
    let extrapolated_error = (limit - reference).norm();
    let strictly_decreasing = levels.windows(2).all(|w| w[1].error < w[0].error);
    let last_error = levels.last().expect("at least two levels").error;
    let converged = strictly_decreasing && extrapolated_error < 10.0 * last_error;
    Ok(ConvergenceReport {
        levels,
        order: Some(order),
        limit,
        extrapolated_error,
        converged,
    })
}
