//! Richardson extrapolation on halving parameter ladders and log-log
//! convergence-order estimation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::validate_halving;

/// A sequence of computed values together with the control parameter each
/// value was computed at. Parameters are strictly decreasing and halve from
/// level to level (within 1%); the pairing is `values[k] <-> parameters[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationLadder {
    pub parameters: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ExtrapolationLadder {
    pub fn new(parameters: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if parameters.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "ladder has {} parameters but {} values",
                parameters.len(),
                values.len()
            )));
        }
        validate_halving(&parameters)?;
        Ok(ExtrapolationLadder { parameters, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Finest (last) raw value of the ladder.
    pub fn finest(&self) -> Complex64 {
        *self.values.last().expect("ladder is never empty")
    }
}

/// Richardson-extrapolate a halving ladder whose leading error term is
/// `O(parameter^order)`, assuming successive integer powers beyond it.
/// With `k` entries the tableau eliminates error terms up through
/// `parameter^(order + k - 2)`; the `[k][k]` corner is returned.
///
/// Real and imaginary parts extrapolate independently (the tableau is a
/// linear operation).
pub fn richardson_extrapolate(ladder: &ExtrapolationLadder, order: usize) -> Result<Complex64> {
    if ladder.len() < 2 {
        return Err(Error::LadderTooShort { len: ladder.len() });
    }
    if order == 0 {
        return Err(Error::InvalidParameter(
            "extrapolation order must be at least 1".into(),
        ));
    }
    // The constructor has already validated the halving ratio, but ladders
    // can arrive via struct literal too.
    validate_halving(&ladder.parameters)?;

    let mut column: Vec<Complex64> = ladder.values.clone();
    let mut width = column.len();
    let mut stage = 0usize;
    while width > 1 {
        // Parameters halve, so eliminating the term h^(order + stage) uses
        // the exact weight 2^(order + stage).
        let pow = 2f64.powi((order + stage) as i32);
        for i in 0..width - 1 {
            // column[i+1] is the finer value.
            column[i] = column[i + 1] + (column[i + 1] - column[i]) / (pow - 1.0);
        }
        width -= 1;
        stage += 1;
    }
    Ok(column[0])
}

/// Least-squares slope of `log|value - reference|` against `log parameter`.
/// Errors with `ZeroError` if any deviation vanishes exactly (the order is
/// undefined there, typically because the sequence is already converged).
pub fn estimate_convergence_order(
    ladder: &ExtrapolationLadder,
    reference: Complex64,
) -> Result<f64> {
    if ladder.len() < 2 {
        return Err(Error::LadderTooShort { len: ladder.len() });
    }
    let mut xs = Vec::with_capacity(ladder.len());
    let mut ys = Vec::with_capacity(ladder.len());
    for (i, (&h, &v)) in ladder.parameters.iter().zip(&ladder.values).enumerate() {
        let err = (v - reference).norm();
        if err == 0.0 {
            return Err(Error::ZeroError { index: i });
        }
        xs.push(h.ln());
        ys.push(err.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
