//! The seven experiment subcommands: flag definitions, flag/file merging,
//! and the drivers that turn a resolved experiment into a CSV table.
//!
//! Every command follows the same shape: merge flags over the optional
//! config file (flags win), validate the description (exit 2 on failure),
//! run the library operations (exit 3 on failure), emit one table. All
//! defaults live here, next to the flags they back.

use crate::config::{fill, parse_f64_list, parse_usize_list, parse_window, ConfigFile};
use crate::csv::{Cell, Table};
use crate::{numerical, validation, CliError};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use pathkernel::control::verify_dressed_invariance;
use pathkernel::control::{convergence_report, ConvergenceReport};
use pathkernel::lattice::{
    action_gradient, classical_path_solve, discrete_action, hessian_tridiagonal, LagrangianSpec,
    LatticeConfig, LatticePath,
};
use pathkernel::numerics::{
    extrapolate_levels, EtaLadder, ExtrapolationLadder, RegularizationParams,
};
use pathkernel::propagator::{
    compose_kernels, ehrenfest_residual_levels, gradient_scale, lattice_kernel_exact,
    oracle_free_kernel, oracle_harmonic_kernel, literal_prefactor_ratio, KernelSpec,
    Normalization, TimedKernel,
};
use pathkernel::stationary::{
    critical_point_oracle, delta_pairing, Observable, ScalarObjective,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Parser)]
#[command(
    name = "pathkernel",
    version,
    about = "Oscillatory-integral and sliced-kernel experiments, written as CSV tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Damped stationary-phase pairing against its critical-point limit
    StaticDelta(StaticDeltaArgs),
    /// Classical path of the sliced action
    Lattice(LatticeArgs),
    /// Sliced kernel over a slice-count ladder against the closed form
    Propagate(PropagateArgs),
    /// Two half-interval kernels composed against the full-interval kernel
    Compose(ComposeArgs),
    /// Mean action-gradient residual under the kernel weight, per damping level
    Ehrenfest(EhrenfestArgs),
    /// Finite-difference validation of action derivatives on random paths
    Sweep(SweepArgs),
    /// Kernel at a rescaled quantum scale against the rescaled action
    Invariance(InvarianceArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::StaticDelta(args) => run_static_delta(args),
        Command::Lattice(args) => run_lattice(args),
        Command::Propagate(args) => run_propagate(args),
        Command::Compose(args) => run_compose(args),
        Command::Ehrenfest(args) => run_ehrenfest(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Invariance(args) => run_invariance(args),
    }
}

// ---------------------------------------------------------------------------
// shared resolution helpers

fn load_file(
    config: &Option<String>,
    command: &str,
    allowed: &[&str],
) -> Result<ConfigFile, CliError> {
    let file = match config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    file.check_against(command, allowed)?;
    Ok(file)
}

fn require_out(out: Option<String>) -> Result<String, CliError> {
    out.ok_or_else(|| {
        CliError::Validation(
            "no output path: pass --out or set `out` in the config file".to_string(),
        )
    })
}

/// Positive, finite, strictly halving (within 1%), largest first. Ladder
/// shape problems are description problems, caught before anything runs.
fn require_halving(values: &[f64], what: &str) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Validation(format!("{what} must not be empty")));
    }
    for &v in values {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Validation(format!(
                "{what} entries must be positive and finite, got {v}"
            )));
        }
    }
    for pair in values.windows(2) {
        let ratio = pair[1] / pair[0];
        if (ratio - 0.5).abs() > 0.005 {
            return Err(CliError::Validation(format!(
                "{what} must halve from entry to entry, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    Ok(())
}

/// Slice counts: at least two levels, each ≥ 2 slices, exactly doubling.
fn require_doubling(counts: &[usize], what: &str) -> Result<(), CliError> {
    if counts.len() < 2 {
        return Err(CliError::Validation(format!(
            "{what} needs at least two levels to extrapolate, got {}",
            counts.len()
        )));
    }
    for &c in counts {
        if c < 2 {
            return Err(CliError::Validation(format!(
                "{what} entries must be at least 2 slices, got {c}"
            )));
        }
    }
    for pair in counts.windows(2) {
        if pair[1] != 2 * pair[0] {
            return Err(CliError::Validation(format!(
                "{what} must double from entry to entry, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    Ok(())
}

/// Regularization from an optional explicit damping ladder; engine-sized
/// defaults otherwise.
fn resolve_reg(eta_ladder: &Option<String>) -> Result<RegularizationParams, CliError> {
    match eta_ladder {
        Some(raw) => {
            let etas = parse_f64_list(raw, "eta-ladder")?;
            require_halving(&etas, "eta-ladder")?;
            Ok(RegularizationParams {
                eta: EtaLadder::Explicit(etas),
                ..RegularizationParams::default()
            })
        }
        None => Ok(RegularizationParams::default()),
    }
}

fn parse_normalization(raw: &str) -> Result<Normalization, CliError> {
    match raw {
        "exact" => Ok(Normalization::Exact),
        "literal" => Ok(Normalization::Literal),
        other => Err(CliError::Validation(format!(
            "normalization must be `exact` or `literal`, got `{other}`"
        ))),
    }
}

/// Pick the Lagrangian family from the couplings: the quartic term wins,
/// then the frequency, then free motion.
fn build_lagrangian(mass: f64, omega: f64, lambda: f64) -> Result<LagrangianSpec, CliError> {
    let lag = if lambda != 0.0 {
        LagrangianSpec::quartic(mass, omega, lambda)
    } else if omega != 0.0 {
        LagrangianSpec::harmonic(mass, omega)
    } else {
        LagrangianSpec::free(mass)
    };
    lag.map_err(validation)
}

/// Closed-form kernel for the quadratic families.
fn quadratic_oracle(
    mass: f64,
    omega: f64,
    h: f64,
    phi0: f64,
    phi1: f64,
    t: f64,
) -> Result<C64, CliError> {
    let value = if omega == 0.0 {
        oracle_free_kernel(mass, h, phi0, phi1, t)
    } else {
        oracle_harmonic_kernel(mass, omega, h, phi0, phi1, t)
    };
    value.map_err(|e| {
        numerical(
            "closed-form kernel",
            format!("mass = {mass}, omega = {omega}, t = {t}"),
            e,
        )
    })
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_usize(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

// ---------------------------------------------------------------------------
// static-delta

#[derive(Debug, Args)]
pub struct StaticDeltaArgs {
    /// Experiment file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Phase polynomial coefficients, ascending powers (default x² − 2x + 1)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Integration window low,high (default -4,4)
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Halving phase-scale ladder, largest first (default 0.02,0.01,0.005)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub eps_ladder: Option<String>,
    /// Explicit halving damping ladder (default: sized from the geometry)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub eta_ladder: Option<String>,
    /// Amplitude under the phase: `gaussian` (e^{-x²/2}) or `unit`
    #[arg(long, value_name = "NAME")]
    pub observable: Option<String>,
}

const STATIC_DELTA_KEYS: &[&str] = &[
    "out",
    "coeffs",
    "window",
    "eps-ladder",
    "eta-ladder",
    "observable",
];

fn run_static_delta(mut args: StaticDeltaArgs) -> Result<(), CliError> {
    let file = load_file(&args.config, "static-delta", STATIC_DELTA_KEYS)?;
    fill(&mut args.out, &file, "out")?;
    fill(&mut args.coeffs, &file, "coeffs")?;
    fill(&mut args.window, &file, "window")?;
    fill(&mut args.eps_ladder, &file, "eps-ladder")?;
    fill(&mut args.eta_ladder, &file, "eta-ladder")?;
    fill(&mut args.observable, &file, "observable")?;

    let out = require_out(args.out)?;
    let coeffs = parse_f64_list(args.coeffs.as_deref().unwrap_or("1,-2,1"), "coeffs")?;
    let window = parse_window(args.window.as_deref().unwrap_or("-4,4"), "window")?;
    let epsilons = parse_f64_list(
        args.eps_ladder.as_deref().unwrap_or("0.02,0.01,0.005"),
        "eps-ladder",
    )?;
    require_halving(&epsilons, "eps-ladder")?;
    let reg = resolve_reg(&args.eta_ladder)?;
    let observable_name = args.observable.as_deref().unwrap_or("gaussian").to_string();
    // The pairing weighs the squared amplitude; the limit formula needs that
    // square directly, so both forms are built side by side.
    let (amplitude, squared) = match observable_name.as_str() {
        "gaussian" => (
            Observable::real(|x: f64| (-x * x / 2.0).exp()),
            Observable::real(|x: f64| (-x * x).exp()),
        ),
        "unit" => (Observable::unit(), Observable::unit()),
        other => {
            return Err(CliError::Validation(format!(
                "observable must be `gaussian` or `unit`, got `{other}`"
            )))
        }
    };
    let objective = ScalarObjective::polynomial(&coeffs, window).map_err(validation)?;

    let oracle = critical_point_oracle(&objective, &squared, window).map_err(|e| {
        numerical(
            "critical-point limit",
            format!("coeffs = {} on window {:?}", join_f64(&coeffs), window),
            e,
        )
    })?;

    let mut values = Vec::with_capacity(epsilons.len());
    for &eps in &epsilons {
        let value = delta_pairing(&objective, &amplitude, eps, &reg)
            .map_err(|e| numerical("delta pairing", format!("epsilon = {eps}"), e))?;
        values.push(value);
    }
    let extrapolated = extrapolate_levels(&epsilons, &values)
        .map_err(|e| numerical("epsilon extrapolation", join_f64(&epsilons), e))?;

    let mut table = Table::new(&[
        "epsilon",
        "pairing_re",
        "pairing_im",
        "oracle",
        "abs_error",
        "rel_error",
    ]);
    table.echo("command", "static-delta");
    table.echo("coeffs", join_f64(&coeffs));
    table.echo("window", format!("{},{}", window.0, window.1));
    table.echo("eps-ladder", join_f64(&epsilons));
    table.echo("observable", &observable_name);
    let mut push = |label: Cell, value: C64| {
        let abs = (value - oracle).norm();
        table.push(vec![
            label,
            Cell::Num(value.re),
            Cell::Num(value.im),
            Cell::Num(oracle),
            Cell::Num(abs),
            Cell::Num(abs / oracle.abs()),
        ]);
    };
    for (&eps, &value) in epsilons.iter().zip(&values) {
        push(Cell::Num(eps), value);
    }
    push(Cell::Text("extrapolated".to_string()), extrapolated);
    table.write(&out)
}

// ---------------------------------------------------------------------------
// lattice

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Experiment file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Particle mass (default 1)
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Oscillator frequency; 0 selects free motion (default 1)
    #[arg(long, value_name = "W", allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Quartic coupling; 0 keeps the action quadratic (default 0)
    #[arg(long, value_name = "L", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Left boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    /// Right boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    /// Total duration (default 1)
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Interior grid points (default 8)
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
}

const LATTICE_KEYS: &[&str] = &[
    "out", "mass", "omega", "lambda", "phi0", "phi1", "t", "n",
];

fn run_lattice(mut args: LatticeArgs) -> Result<(), CliError> {
    let file = load_file(&args.config, "lattice", LATTICE_KEYS)?;
    fill(&mut args.out, &file, "out")?;
    fill(&mut args.mass, &file, "mass")?;
    fill(&mut args.omega, &file, "omega")?;
    fill(&mut args.lambda, &file, "lambda")?;
    fill(&mut args.phi0, &file, "phi0")?;
    fill(&mut args.phi1, &file, "phi1")?;
    fill(&mut args.t, &file, "t")?;
    fill(&mut args.n, &file, "n")?;

    let out = require_out(args.out)?;
    let mass = args.mass.unwrap_or(1.0);
    let omega = args.omega.unwrap_or(1.0);
    let lambda = args.lambda.unwrap_or(0.0);
    let phi0 = args.phi0.unwrap_or(0.0);
    let phi1 = args.phi1.unwrap_or(0.0);
    let t = args.t.unwrap_or(1.0);
    let n = args.n.unwrap_or(8);
    if n == 0 {
        return Err(CliError::Validation(
            "n must be at least 1 interior point".to_string(),
        ));
    }

    let lag = build_lagrangian(mass, omega, lambda)?;
    let config = LatticeConfig::new(phi0, phi1, 0.0, t, n).map_err(validation)?;
    let path = classical_path_solve(&lag, config).map_err(|e| {
        numerical(
            "classical path solve",
            format!("n = {n}, duration = {t}"),
            e,
        )
    })?;
    let action = discrete_action(&lag, &path);

    let mut table = Table::new(&["node", "time", "position"]);
    table.echo("command", "lattice");
    table.echo("mass", mass);
    table.echo("omega", omega);
    table.echo("lambda", lambda);
    table.echo("phi0", phi0);
    table.echo("phi1", phi1);
    table.echo("t", t);
    table.echo("n", n);
    table.echo("action", crate::csv::format_f64(action));
    for node in 0..=n + 1 {
        table.push(vec![
            Cell::Int(node as i64),
            Cell::Num(config.node_time(node)),
            Cell::Num(path.node(node)),
        ]);
    }
    table.write(&out)?;
    println!("classical path: {n} interior points, action = {action:.6}");
    Ok(())
}

// ---------------------------------------------------------------------------
// propagate

#[derive(Debug, Args)]
pub struct PropagateArgs {
    /// Experiment file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Particle mass (default 1)
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Oscillator frequency; 0 selects free motion (default 1)
    #[arg(long, value_name = "W", allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Quartic coupling; must stay 0 — this command needs the closed form
    #[arg(long, value_name = "L", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Left boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    /// Right boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    /// Total duration (default 1)
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Quantum scale (default 1)
    #[arg(long, value_name = "H", allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Doubling slice counts, coarsest first (default 8,16,32,64)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub n_ladder: Option<String>,
    /// Prefactor convention: `exact` or `literal` (default exact)
    #[arg(long, value_name = "NAME")]
    pub normalization: Option<String>,
}

const PROPAGATE_KEYS: &[&str] = &[
    "out",
    "mass",
    "omega",
    "lambda",
    "phi0",
    "phi1",
    "t",
    "h",
    "n-ladder",
    "normalization",
];

fn run_propagate(mut args: PropagateArgs) -> Result<(), CliError> {
    let file = load_file(&args.config, "propagate", PROPAGATE_KEYS)?;
    fill(&mut args.out, &file, "out")?;
    fill(&mut args.mass, &file, "mass")?;
    fill(&mut args.omega, &file, "omega")?;
    fill(&mut args.lambda, &file, "lambda")?;
    fill(&mut args.phi0, &file, "phi0")?;
    fill(&mut args.phi1, &file, "phi1")?;
    fill(&mut args.t, &file, "t")?;
    fill(&mut args.h, &file, "h")?;
    fill(&mut args.n_ladder, &file, "n-ladder")?;
    fill(&mut args.normalization, &file, "normalization")?;

    let out = require_out(args.out)?;
    let mass = args.mass.unwrap_or(1.0);
    let omega = args.omega.unwrap_or(1.0);
    let lambda = args.lambda.unwrap_or(0.0);
    if lambda != 0.0 {
        return Err(CliError::Validation(
            "propagate compares against closed forms, which exist only for \
             quadratic actions; lambda must be 0"
                .to_string(),
        ));
    }
    let phi0 = args.phi0.unwrap_or(0.0);
    let phi1 = args.phi1.unwrap_or(0.0);
    let t = args.t.unwrap_or(1.0);
    let h = args.h.unwrap_or(1.0);
    let slices = parse_usize_list(args.n_ladder.as_deref().unwrap_or("8,16,32,64"), "n-ladder")?;
    require_doubling(&slices, "n-ladder")?;
    let norm_name = args.normalization.as_deref().unwrap_or("exact").to_string();
    let normalization = parse_normalization(&norm_name)?;

    let lag = build_lagrangian(mass, omega, 0.0)?;
    let spec = KernelSpec::new(lag, h, normalization).map_err(validation)?;
    let oracle = quadratic_oracle(mass, omega, h, phi0, phi1, t)?;

    let mut eps_primes = Vec::with_capacity(slices.len());
    let mut kernels = Vec::with_capacity(slices.len());
    let mut references = Vec::with_capacity(slices.len());
    for &count in &slices {
        let config = LatticeConfig::new(phi0, phi1, 0.0, t, count - 1).map_err(validation)?;
        let kernel = lattice_kernel_exact(&spec, config)
            .map_err(|e| numerical("sliced kernel", format!("{count} slices"), e))?;
        // Under the slice-dependent prefactor the closed form is reproduced
        // only after multiplying in the documented discrepancy ratio.
        let reference = match normalization {
            Normalization::Exact => oracle,
            Normalization::Literal => oracle * literal_prefactor_ratio(&spec, &config),
        };
        eps_primes.push(config.eps_prime());
        kernels.push(kernel.value);
        references.push(reference);
    }

    let mut table = Table::new(&[
        "level",
        "slices",
        "eps_prime",
        "kernel_re",
        "kernel_im",
        "modulus",
        "phase",
        "reference_re",
        "reference_im",
        "abs_error",
        "rel_error",
    ]);
    table.echo("command", "propagate");
    table.echo("mass", mass);
    table.echo("omega", omega);
    table.echo("phi0", phi0);
    table.echo("phi1", phi1);
    table.echo("t", t);
    table.echo("h", h);
    table.echo("n-ladder", join_usize(&slices));
    table.echo("normalization", &norm_name);

    for (level, &count) in slices.iter().enumerate() {
        let kernel = kernels[level];
        let reference = references[level];
        let abs = (kernel - reference).norm();
        table.push(vec![
            Cell::Int(level as i64),
            Cell::Int(count as i64),
            Cell::Num(eps_primes[level]),
            Cell::Num(kernel.re),
            Cell::Num(kernel.im),
            Cell::Num(kernel.norm()),
            Cell::Num(kernel.arg()),
            Cell::Num(reference.re),
            Cell::Num(reference.im),
            Cell::Num(abs),
            Cell::Num(abs / reference.norm()),
        ]);
    }

    // The slice-dependent prefactor makes the literal-prefactor series
    // diverge by construction; extrapolating it would manufacture a limit
    // that does not exist, so the limit row is reserved for `exact`.
    if normalization == Normalization::Exact {
        let ladder = ExtrapolationLadder::new(eps_primes, kernels)
            .map_err(|e| numerical("extrapolation ladder", join_usize(&slices), e))?;
        let report: ConvergenceReport = convergence_report(&ladder, oracle)
            .map_err(|e| numerical("convergence report", join_usize(&slices), e))?;
        match report.order {
            Some(order) => table.echo("observed-order", crate::csv::format_f64(order)),
            None => table.echo("observed-order", "flat"),
        }
        table.echo("converged", report.converged);
        table.push(vec![
            Cell::Text("extrapolated".to_string()),
            Cell::Empty,
            Cell::Empty,
            Cell::Num(report.limit.re),
            Cell::Num(report.limit.im),
            Cell::Num(report.limit.norm()),
            Cell::Num(report.limit.arg()),
            Cell::Num(oracle.re),
            Cell::Num(oracle.im),
            Cell::Num(report.extrapolated_error),
            Cell::Num(report.extrapolated_error / oracle.norm()),
        ]);
    }
    table.write(&out)
}

// ---------------------------------------------------------------------------
// compose

#[derive(Debug, Args)]
pub struct ComposeArgs {
    /// Experiment file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Particle mass (default 1)
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Oscillator frequency; 0 selects free motion (default 1)
    #[arg(long, value_name = "W", allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Left boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    /// Right boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    /// Total duration (default 1)
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Splitting time (default t/2)
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t_mid: Option<f64>,
    /// Quantum scale (default 1)
    #[arg(long, value_name = "H", allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Intermediate integration window low,high (default -20,21)
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Explicit halving damping ladder (default: sized from the window)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub eta_ladder: Option<String>,
}

const COMPOSE_KEYS: &[&str] = &[
    "out",
    "mass",
    "omega",
    "phi0",
    "phi1",
    "t",
    "t-mid",
    "h",
    "window",
    "eta-ladder",
];

fn run_compose(mut args: ComposeArgs) -> Result<(), CliError> {
    let file = load_file(&args.config, "compose", COMPOSE_KEYS)?;
    fill(&mut args.out, &file, "out")?;
    fill(&mut args.mass, &file, "mass")?;
    fill(&mut args.omega, &file, "omega")?;
    fill(&mut args.phi0, &file, "phi0")?;
    fill(&mut args.phi1, &file, "phi1")?;
    fill(&mut args.t, &file, "t")?;
    fill(&mut args.t_mid, &file, "t-mid")?;
    fill(&mut args.h, &file, "h")?;
    fill(&mut args.window, &file, "window")?;
    fill(&mut args.eta_ladder, &file, "eta-ladder")?;

    let out = require_out(args.out)?;
    let mass = args.mass.unwrap_or(1.0);
    let omega = args.omega.unwrap_or(1.0);
    let phi0 = args.phi0.unwrap_or(0.0);
    let phi1 = args.phi1.unwrap_or(0.0);
    let t = args.t.unwrap_or(1.0);
    let t_mid = args.t_mid.unwrap_or(t / 2.0);
    if !(t_mid > 0.0 && t_mid < t) {
        return Err(CliError::Validation(format!(
            "t-mid must split (0, {t}), got {t_mid}"
        )));
    }
    let h = args.h.unwrap_or(1.0);
    let window = parse_window(args.window.as_deref().unwrap_or("-20,21"), "window")?;
    let reg = resolve_reg(&args.eta_ladder)?;

    let oracle_pair = |t0: f64, t1: f64| -> Result<TimedKernel, CliError> {
        let kernel = if omega == 0.0 {
            TimedKernel::free_oracle(mass, h, t0, t1)
        } else {
            TimedKernel::harmonic_oracle(mass, omega, h, t0, t1)
        };
        kernel.map_err(|e| {
            numerical(
                "closed-form kernel",
                format!("interval [{t0}, {t1}]"),
                e,
            )
        })
    };
    let left = oracle_pair(0.0, t_mid)?;
    let right = oracle_pair(t_mid, t)?;
    let composed_kernel = compose_kernels(&left, &right, window, &reg)
        .map_err(|e| numerical("kernel composition", format!("window {window:?}"), e))?;
    let composed = composed_kernel
        .evaluate(phi0, phi1)
        .map_err(|e| numerical("composed kernel", format!("({phi0}, {phi1})"), e))?;
    let reference = quadratic_oracle(mass, omega, h, phi0, phi1, t)?;
    let abs = (composed - reference).norm();

    let mut table = Table::new(&[
        "phi0",
        "phi1",
        "composed_re",
        "composed_im",
        "reference_re",
        "reference_im",
        "abs_error",
        "rel_error",
    ]);
    table.echo("command", "compose");
    table.echo("mass", mass);
    table.echo("omega", omega);
    table.echo("t", t);
    table.echo("t-mid", t_mid);
    table.echo("h", h);
    table.echo("window", format!("{},{}", window.0, window.1));
    table.push(vec![
        Cell::Num(phi0),
        Cell::Num(phi1),
        Cell::Num(composed.re),
        Cell::Num(composed.im),
        Cell::Num(reference.re),
        Cell::Num(reference.im),
        Cell::Num(abs),
        Cell::Num(abs / reference.norm()),
    ]);
    table.write(&out)
}

// ---------------------------------------------------------------------------
// ehrenfest

#[derive(Debug, Args)]
pub struct EhrenfestArgs {
    /// Experiment file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Particle mass (default 1)
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Oscillator frequency; 0 selects free motion (default 1)
    #[arg(long, value_name = "W", allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Quartic coupling; 0 keeps the action quadratic (default 0)
    #[arg(long, value_name = "L", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Left boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    /// Right boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    /// Total duration (default 1)
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Interior grid points, at most 3 (default 2)
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
    /// Quantum scale (default 1)
    #[arg(long, value_name = "H", allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Interior site whose gradient is averaged, 1-based (default 1)
    #[arg(long, value_name = "S")]
    pub site: Option<usize>,
    /// Explicit halving damping ladder (default: sized from the geometry)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub eta_ladder: Option<String>,
}

const EHRENFEST_KEYS: &[&str] = &[
    "out",
    "mass",
    "omega",
    "lambda",
    "phi0",
    "phi1",
    "t",
    "n",
    "h",
    "site",
    "eta-ladder",
];

fn run_ehrenfest(mut args: EhrenfestArgs) -> Result<(), CliError> {
    let file = load_file(&args.config, "ehrenfest", EHRENFEST_KEYS)?;
    fill(&mut args.out, &file, "out")?;
    fill(&mut args.mass, &file, "mass")?;
    fill(&mut args.omega, &file, "omega")?;
    fill(&mut args.lambda, &file, "lambda")?;
    fill(&mut args.phi0, &file, "phi0")?;
    fill(&mut args.phi1, &file, "phi1")?;
    fill(&mut args.t, &file, "t")?;
    fill(&mut args.n, &file, "n")?;
    fill(&mut args.h, &file, "h")?;
    fill(&mut args.site, &file, "site")?;
    fill(&mut args.eta_ladder, &file, "eta-ladder")?;

    let out = require_out(args.out)?;
    let mass = args.mass.unwrap_or(1.0);
    let omega = args.omega.unwrap_or(1.0);
    let lambda = args.lambda.unwrap_or(0.0);
    let phi0 = args.phi0.unwrap_or(0.0);
    let phi1 = args.phi1.unwrap_or(0.0);
    let t = args.t.unwrap_or(1.0);
    let n = args.n.unwrap_or(2);
    if !(1..=3).contains(&n) {
        return Err(CliError::Validation(format!(
            "n must lie in 1..=3 (each interior point is one quadrature axis), got {n}"
        )));
    }
    let site = args.site.unwrap_or(1);
    if !(1..=n).contains(&site) {
        return Err(CliError::Validation(format!(
            "site must lie in 1..={n}, got {site}"
        )));
    }
    let h = args.h.unwrap_or(1.0);
    let reg = resolve_reg(&args.eta_ladder)?;

    let lag = build_lagrangian(mass, omega, lambda)?;
    let spec = KernelSpec::exact(lag, h).map_err(validation)?;
    let config = LatticeConfig::new(phi0, phi1, 0.0, t, n).map_err(validation)?;
    let levels = ehrenfest_residual_levels(&spec, config, site, &reg)
        .map_err(|e| numerical("residual levels", format!("site {site}, n = {n}"), e))?;
    let scale = gradient_scale(&spec, config, site)
        .map_err(|e| numerical("gradient scale", format!("site {site}, n = {n}"), e))?;

    let mut table = Table::new(&[
        "eta",
        "residual_re",
        "residual_im",
        "modulus",
        "modulus_over_scale",
    ]);
    table.echo("command", "ehrenfest");
    table.echo("mass", mass);
    table.echo("omega", omega);
    table.echo("lambda", lambda);
    table.echo("phi0", phi0);
    table.echo("phi1", phi1);
    table.echo("t", t);
    table.echo("n", n);
    table.echo("h", h);
    table.echo("site", site);
    table.echo("gradient-scale", crate::csv::format_f64(scale));
    let mut push = |label: Cell, value: C64| {
        table.push(vec![
            label,
            Cell::Num(value.re),
            Cell::Num(value.im),
            Cell::Num(value.norm()),
            Cell::Num(value.norm() / scale),
        ]);
    };
    for (&eta, &value) in levels.etas.iter().zip(&levels.values) {
        push(Cell::Num(eta), value);
    }
    push(Cell::Text("extrapolated".to_string()), levels.extrapolated);
    table.write(&out)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Experiment file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Particle mass (default 1)
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Oscillator frequency; 0 selects free motion (default 1)
    #[arg(long, value_name = "W", allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Quartic coupling; 0 keeps the action quadratic (default 0)
    #[arg(long, value_name = "L", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Number of random paths (default 100)
    #[arg(long, value_name = "K")]
    pub count: Option<usize>,
    /// RNG seed (default 7)
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
}

const SWEEP_KEYS: &[&str] = &["out", "mass", "omega", "lambda", "count", "seed"];

fn run_sweep(mut args: SweepArgs) -> Result<(), CliError> {
    let file = load_file(&args.config, "sweep", SWEEP_KEYS)?;
    fill(&mut args.out, &file, "out")?;
    fill(&mut args.mass, &file, "mass")?;
    fill(&mut args.omega, &file, "omega")?;
    fill(&mut args.lambda, &file, "lambda")?;
    fill(&mut args.count, &file, "count")?;
    fill(&mut args.seed, &file, "seed")?;

    let out = require_out(args.out)?;
    let mass = args.mass.unwrap_or(1.0);
    let omega = args.omega.unwrap_or(1.0);
    let lambda = args.lambda.unwrap_or(0.0);
    let count = args.count.unwrap_or(100);
    if count == 0 {
        return Err(CliError::Validation("count must be at least 1".to_string()));
    }
    let seed = args.seed.unwrap_or(7);

    let lag = build_lagrangian(mass, omega, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut table = Table::new(&[
        "index",
        "n",
        "phi0",
        "phi1",
        "t",
        "gradient_rel_error",
        "hessian_rel_error",
    ]);
    table.echo("command", "sweep");
    table.echo("mass", mass);
    table.echo("omega", omega);
    table.echo("lambda", lambda);
    table.echo("count", count);
    table.echo("seed", seed);

    for index in 0..count {
        let n = rng.gen_range(1..=8usize);
        let phi0 = rng.gen_range(-1.5..1.5);
        let phi1 = rng.gen_range(-1.5..1.5);
        let t = rng.gen_range(0.5..2.0);
        let interior: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let config = LatticeConfig::new(phi0, phi1, 0.0, t, n).map_err(validation)?;
        let path = LatticePath::new(config, interior).map_err(validation)?;
        let (grad_err, hess_err) = derivative_check(&lag, &path);
        table.push(vec![
            Cell::Int(index as i64),
            Cell::Int(n as i64),
            Cell::Num(phi0),
            Cell::Num(phi1),
            Cell::Num(t),
            Cell::Num(grad_err),
            Cell::Num(hess_err),
        ]);
    }
    table.write(&out)
}

/// Central-difference check of the action gradient and the tridiagonal
/// Hessian bands on one path. Returns the worst relative miss of each,
/// with relative meaning |analytic − numerical| / (1 + |analytic|).
fn derivative_check(lag: &LagrangianSpec, path: &LatticePath) -> (f64, f64) {
    let config = *path.config();
    let interior = path.interior().to_vec();
    let n = interior.len();
    let analytic = action_gradient(lag, path);
    let (diag, off) = hessian_tridiagonal(lag, path);

    let rebuilt = |nodes: Vec<f64>| {
        LatticePath::new(config, nodes).expect("perturbed interior stays finite")
    };
    let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + a.abs());

    let mut grad_err: f64 = 0.0;
    let mut hess_err: f64 = 0.0;
    for i in 0..n {
        let step = 1e-5 * (1.0 + interior[i].abs());
        let mut up = interior.clone();
        up[i] += step;
        let mut down = interior.clone();
        down[i] -= step;
        let (up, down) = (rebuilt(up), rebuilt(down));

        let fd = (discrete_action(lag, &up) - discrete_action(lag, &down)) / (2.0 * step);
        grad_err = grad_err.max(rel(analytic[i], fd));

        // Column i of the Hessian from the gradient; the tridiagonal bands
        // are its entries at i and i±1.
        let grad_up = action_gradient(lag, &up);
        let grad_down = action_gradient(lag, &down);
        hess_err = hess_err.max(rel(diag[i], (grad_up[i] - grad_down[i]) / (2.0 * step)));
        if i + 1 < n {
            hess_err = hess_err.max(rel(off[i], (grad_up[i + 1] - grad_down[i + 1]) / (2.0 * step)));
        }
        if i > 0 {
            hess_err = hess_err.max(rel(off[i - 1], (grad_up[i - 1] - grad_down[i - 1]) / (2.0 * step)));
        }
    }
    (grad_err, hess_err)
}

// ---------------------------------------------------------------------------
// invariance

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    /// Experiment file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<String>,
    /// Output CSV path
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Particle mass (default 1)
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Oscillator frequency; 0 selects free motion (default 1)
    #[arg(long, value_name = "W", allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Left boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    /// Right boundary value (default 0)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    /// Total duration (default 1)
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Interior grid points (default 8)
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
    /// Base quantum scale (default 1)
    #[arg(long, value_name = "H", allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Scale factors to test (default 0.1,0.5,2,10)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub mu_list: Option<String>,
}

const INVARIANCE_KEYS: &[&str] = &[
    "out", "mass", "omega", "phi0", "phi1", "t", "n", "h", "mu-list",
];

fn run_invariance(mut args: InvarianceArgs) -> Result<(), CliError> {
    let file = load_file(&args.config, "invariance", INVARIANCE_KEYS)?;
    fill(&mut args.out, &file, "out")?;
    fill(&mut args.mass, &file, "mass")?;
    fill(&mut args.omega, &file, "omega")?;
    fill(&mut args.phi0, &file, "phi0")?;
    fill(&mut args.phi1, &file, "phi1")?;
    fill(&mut args.t, &file, "t")?;
    fill(&mut args.n, &file, "n")?;
    fill(&mut args.h, &file, "h")?;
    fill(&mut args.mu_list, &file, "mu-list")?;

    let out = require_out(args.out)?;
    let mass = args.mass.unwrap_or(1.0);
    let omega = args.omega.unwrap_or(1.0);
    let phi0 = args.phi0.unwrap_or(0.0);
    let phi1 = args.phi1.unwrap_or(0.0);
    let t = args.t.unwrap_or(1.0);
    let n = args.n.unwrap_or(8);
    if n == 0 {
        return Err(CliError::Validation(
            "n must be at least 1 interior point".to_string(),
        ));
    }
    let h = args.h.unwrap_or(1.0);
    let mus = parse_f64_list(args.mu_list.as_deref().unwrap_or("0.1,0.5,2,10"), "mu-list")?;
    for &mu in &mus {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(CliError::Validation(format!(
                "mu-list entries must be positive and finite, got {mu}"
            )));
        }
    }

    let lag = build_lagrangian(mass, omega, 0.0)?;
    let spec = KernelSpec::exact(lag, h).map_err(validation)?;
    let config = LatticeConfig::new(phi0, phi1, 0.0, t, n).map_err(validation)?;
    let report = verify_dressed_invariance(&spec, config, &mus)
        .map_err(|e| numerical("invariance check", format!("mu in {}", join_f64(&mus)), e))?;

    let mut table = Table::new(&[
        "mu",
        "scaled_h_re",
        "scaled_h_im",
        "rescaled_re",
        "rescaled_im",
        "relative_deviation",
    ]);
    table.echo("command", "invariance");
    table.echo("mass", mass);
    table.echo("omega", omega);
    table.echo("phi0", phi0);
    table.echo("phi1", phi1);
    table.echo("t", t);
    table.echo("n", n);
    table.echo("h", h);
    table.echo("mu-list", join_f64(&mus));
    table.echo("max-deviation", crate::csv::format_f64(report.max_deviation));
    for entry in &report.entries {
        table.push(vec![
            Cell::Num(entry.mu),
            Cell::Num(entry.scaled_h.re),
            Cell::Num(entry.scaled_h.im),
            Cell::Num(entry.rescaled_action.re),
            Cell::Num(entry.rescaled_action.im),
            Cell::Num(entry.relative_deviation),
        ]);
    }
    table.write(&out)
}
