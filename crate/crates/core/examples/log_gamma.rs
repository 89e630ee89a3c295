//! Principal-branch log-Gamma and Gamma ratios in the complex plane.

use num_complex::Complex64;
use coset_forge::specfun::{digamma, gamma_ratio, gamma_ratio_asymptotic, log_gamma};

fn main() -> coset_forge::Result<()> {
    for z in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 1.0), Complex64::new(-2.5, 0.3), Complex64::new(20.0, -35.0)] {
        println!("ln Γ({z}) = {:.15}", log_gamma(z)?);
    }
    println!("ψ(1) = {:.15}", digamma(Complex64::new(1.0, 0.0))?);

    // Γ(x + 1/3)/Γ(x − 1/3) against its large-x expansion
    let (a, b) = (Complex64::from(1.0 / 3.0), Complex64::from(-1.0 / 3.0));
    for r in [20.0, 200.0, 2000.0] {
        let x = Complex64::from_polar(r, 0.7);
        let exact = gamma_ratio(x, a, b)?;
        let approx = gamma_ratio_asymptotic(a, b, x)?;
        println!("|x| = {r:>6}: ratio {exact:.6}, expansion off by {:.2e}", (exact / approx - 1.0).norm());
    }
    Ok(())
}
