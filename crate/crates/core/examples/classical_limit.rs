//! The hbar → 0 limit of the nonlocal exchange factors towards the
//! parafermion braiding phases.

use num_complex::Complex64;
use coset_forge::algebra::{build_catalog, classical_limit, current_exchange, ClassicalBraid, Rotation};
use coset_forge::modes::AlgebraParams;
use coset_forge::rational::qi;

fn main() -> coset_forge::Result<()> {
    let w = Complex64::new(0.01, 1.0);
    for k in [2, 3, 4] {
        let cat = build_catalog(&AlgebraParams::new(qi(k), qi(1))?)?;
        for (a, b, alpha, beta) in [("Psi", "Psi", 1, 1), ("Psi", "PsiDag", 1, -1)] {
            let s = current_exchange(&cat, cat.get(a)?, cat.get(b)?, Rotation::None)?;
            let braid = ClassicalBraid::new(alpha, beta, qi(k))?;
            let (fit, report) = classical_limit(a, s.first(), &braid, w, &[1e-1, 1e-2, 1e-3, 1e-4], 0.9)?;
            let errors: Vec<String> = fit.errors.iter().map(|e| format!("{e:.2e}")).collect();
            println!("k = {k}, {a}/{b}: target {:.6}, errors [{}]", fit.target, errors.join(", "));
            println!("  {}", report.summary_line());
        }
    }
    Ok(())
}
