//! Closed-form reference kernels, evaluated on the principal square-root
//! branch (√i = e^{iπ/4}). Everything downstream is checked against these.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_4, PI};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Free-particle kernel √(m/(2πihT))·e^{im(φ₁−φ₀)²/(2hT)}.
pub fn oracle_free_kernel(m: f64, h: f64, phi0: f64, phi1: f64, t: f64) -> Result<C64> {
    check_positive("mass", m)?;
    check_positive("quantum scale", h)?;
    check_positive("duration", t)?;
    let d = phi1 - phi0;
    let modulus = (m / (2.0 * PI * h * t)).sqrt();
    let phase = m * d * d / (2.0 * h * t) - FRAC_PI_4;
    Ok(C64::from_polar(modulus, phase))
}

/// Harmonic-oscillator kernel (Mehler's formula)
/// √(mω/(2πih·sin ωT))·exp{(imω/(2h·sin ωT))·[(φ₀²+φ₁²)cos ωT − 2φ₀φ₁]}.
/// The ω → 0 case is the free kernel; |sin ωT| ≤ 10⁻⁶ is rejected as focal.
pub fn oracle_harmonic_kernel(
    m: f64,
    omega: f64,
    h: f64,
    phi0: f64,
    phi1: f64,
    t: f64,
) -> Result<C64> {
    check_positive("mass", m)?;
    check_positive("quantum scale", h)?;
    check_positive("duration", t)?;
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega must be nonnegative and finite, got {omega}"
        )));
    }
    if omega == 0.0 {
        return oracle_free_kernel(m, h, phi0, phi1, t);
    }
    let s = (omega * t).sin();
    if s.abs() <= 1e-6 {
        return Err(Error::FocalPoint { sin_omega_t: s });
    }
    let c = (omega * t).cos();
    let modulus = (m * omega / (2.0 * PI * h * s.abs())).sqrt();
    // Principal branch of √(1/(i·sin ωT)): phase ∓π/4 with the sign of sin.
    let branch = -FRAC_PI_4 * s.signum();
    let phase = branch + m * omega / (2.0 * h * s) * ((phi0 * phi0 + phi1 * phi1) * c - 2.0 * phi0 * phi1);
    Ok(C64::from_polar(modulus, phase))
}
