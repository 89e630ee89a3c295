//! Double-exponential quadrature on [0, ∞) for oscillatory, slowly decaying
//! integrands.

use num_complex::Complex64;
use coset_forge::quad::{exp_sinh, DEFAULT_TOL, MAX_NODES};

fn main() -> coset_forge::Result<()> {
    // ∫ e^{−t} e^{−iωt} dt = 1/(1 + iω)
    let omega = 3.0;
    let r = exp_sinh(|t| (-(Complex64::new(1.0, omega)) * t).exp(), DEFAULT_TOL, MAX_NODES)?;
    let exact = Complex64::new(1.0, omega).inv();
    println!("damped wave: {:.15} (exact {:.15}), {} nodes, est. error {:.1e}", r.value, exact, r.nodes, r.error);

    // Frullani: ∫ (e^{−t} − e^{−2t})/t dt = ln 2
    let r = exp_sinh(|t| Complex64::from(((-t).exp() - (-2.0 * t).exp()) / t), DEFAULT_TOL, MAX_NODES)?;
    println!("Frullani: {:.15} (ln 2 = {:.15})", r.value.re, 2f64.ln());
    Ok(())
}
