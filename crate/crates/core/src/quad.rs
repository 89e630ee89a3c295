//! Exp-sinh double-exponential quadrature on `(0, ∞)`.
//!
//! `t = exp(π/2 · sinh s)` maps `s ∈ ℝ` onto the half line with doubly
//! exponential decay of the Jacobian at both ends. The trapezoid rule in `s`
//! is refined by halving the step; the difference between successive levels
//! serves as the error estimate.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncation of the `s` axis; `exp(π/2 · sinh 4.5) ≈ e^{70.6}`.
const S_MAX: f64 = 4.5;
const H0: f64 = 0.5;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_NODES: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub nodes: usize,
}

fn node(s: f64) -> (f64, f64) {
    let t = (FRAC_PI_2 * s.sinh()).exp();
    (t, t * FRAC_PI_2 * s.cosh())
}

/// `∫₀^∞ f(t) dt` to absolute accuracy `tol` using at most `max_nodes`
/// integrand evaluations.
pub fn exp_sinh<F>(f: F, tol: f64, max_nodes: usize) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let sample = |s: f64| -> Result<Complex64> {
        let (t, jac) = node(s);
        if t == 0.0 || !t.is_finite() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = f(t) * jac;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(v))
        }
    };

    let mut h = H0;
    let n0 = (S_MAX / h).round() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in -n0..=n0 {
        sum += sample(j as f64 * h)?;
    }
    let mut nodes = (2 * n0 + 1) as usize;
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    loop {
        let n = (S_MAX / (h / 2.0)).round() as i64;
        let fresh = (n + 1) as usize;
        if nodes + fresh > max_nodes {
            break;
        }
        h /= 2.0;
        // only odd multiples of the new step are new nodes
        let mut j = -n + 1;
        while j <= n {
            sum += sample(j as f64 * h)?;
            j += 2;
        }
        nodes += fresh;
        let next = sum * h;
        error = (next - estimate).norm();
        estimate = next;
        if error <= tol {
            return Ok(QuadResult {
                value: estimate,
                error,
                nodes,
            });
        }
    }
    Err(Error::QuadratureNonConvergent(error))
}
