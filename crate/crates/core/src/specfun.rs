//! Complex log-Gamma, Gamma ratios, digamma and the large-argument expansion
//! of Gamma ratios.
//!
//! `log_gamma` is the principal branch: continuous on `ℂ ∖ (−∞, 0]` and real
//! on the positive axis. It shifts the argument right with the recurrence
//! `log Γ(z) = log Γ(z + n) − Σ log(z + j)` until `Re z ≥ 10` and then uses
//! the Stirling series. The left half-plane goes through the same shift so the
//! branch never has to be repaired after a reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

/// Distance below which an argument counts as sitting on a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

const STIRLING_THRESHOLD: f64 = 10.0;

// B_{2n} / (2n (2n - 1)) for n = 1..=10
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

// B_{2n} / (2n) for n = 1..=8
const DIGAMMA_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(z))
    }
}

/// True when `z` is within [`POLE_TOLERANCE`] of `0, −1, −2, …`.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im.abs() <= POLE_TOLERANCE
        && z.re <= POLE_TOLERANCE
        && (z.re - z.re.round()).abs() <= POLE_TOLERANCE
}

fn stirling(z: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + half_ln_2pi + series
}

/// Principal-branch `log Γ(z)`.
pub fn log_gamma(z: ComplexValue) -> Result<ComplexValue> {
    check_finite(z)?;
    if is_gamma_pole(z) {
        return Err(Error::PoleAtNonPositiveInteger(z));
    }
    let mut shifted = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while shifted.re < STIRLING_THRESHOLD {
        acc += shifted.ln();
        shifted += 1.0;
    }
    Ok(stirling(shifted) - acc)
}

/// `Γ(x + a) / Γ(x + b)` computed through log-Gamma differences.
pub fn gamma_ratio(x: ComplexValue, a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
    if a == b {
        check_finite(x)?;
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok((log_gamma(x + a)? - log_gamma(x + b)?).exp())
}

/// Two-term expansion `x^{a−b} (1 + (a−b)(a+b−1)/(2x))` of `Γ(x+a)/Γ(x+b)`.
///
/// Truncation error is `O(|x|^{-2})`; only valid for `|x| ≥ 10`.
pub fn gamma_ratio_asymptotic(
    a: ComplexValue,
    b: ComplexValue,
    x: ComplexValue,
) -> Result<ComplexValue> {
    check_finite(x)?;
    if x.norm() < STIRLING_THRESHOLD {
        return Err(Error::ArgumentTooSmall(x.norm()));
    }
    let d = a - b;
    let lead = (d * x.ln()).exp();
    Ok(lead * (1.0 + d * (a + b - 1.0) / (2.0 * x)))
}

/// Digamma `ψ(z) = d/dz log Γ(z)`.
pub fn digamma(z: ComplexValue) -> Result<ComplexValue> {
    check_finite(z)?;
    if is_gamma_pole(z) {
        return Err(Error::PoleAtNonPositiveInteger(z));
    }
    let mut shifted = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while shifted.re < STIRLING_THRESHOLD {
        acc += shifted.inv();
        shifted += 1.0;
    }
    let inv = shifted.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for c in DIGAMMA_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    Ok(shifted.ln() - 0.5 * inv - series - acc)
}
