//! Contraction integrals of catalog currents: quadrature against the
//! closed Gamma-product form.

use coset_forge::algebra::build_catalog;
use coset_forge::contraction::{contract, strip_grid};
use coset_forge::modes::AlgebraParams;
use coset_forge::rational::{q, qi};

fn main() -> coset_forge::Result<()> {
    let params = AlgebraParams::new(qi(3), q(1, 2))?;
    let cat = build_catalog(&params)?;
    let hbar = params.hbar_f64();
    for (a, b) in [("Cp", "Cm"), ("Bp", "Bp"), ("Lp", "Lm"), ("bp", "Bm")] {
        let ta = &cat.get(a)?.terms[0];
        let tb = &cat.get(b)?.terms[0];
        for (family, ga) in &ta.exponents {
            let Some(gb) = tb.exponents.get(family) else { continue };
            let integrand = contract(ga, gb, cat.kernel(family)?)?;
            let closed = integrand.closed_form()?;
            let w = strip_grid(&integrand.strip_bound().unwrap(), hbar, 1)[0];
            let quad = integrand.quad_eval(w, hbar)?.exp();
            let exact = closed.eval(w, hbar)?;
            println!("{a}·{b} on {family} at w = {w:.3}");
            println!("  closed form {}", closed.canonical());
            println!("  quad {quad:.12}  closed {exact:.12}  rel {:.1e}", (quad - exact).norm() / exact.norm());
        }
    }
    Ok(())
}
