//! Poles and residue operators of the E-F commutator.

use coset_forge::algebra::{build_catalog, ef_commutator_analysis, VerifyOptions};
use coset_forge::modes::AlgebraParams;
use coset_forge::rational::{q, qi};

fn main() -> coset_forge::Result<()> {
    for k in [qi(2), qi(3), q(5, 2)] {
        let cat = build_catalog(&AlgebraParams::new(k, qi(1))?)?;
        let report = ef_commutator_analysis(&cat, &VerifyOptions::default())?;
        println!("{}", report.summary_line());
        for p in &report.poles {
            println!("  pole at w = {:.3}ℏ, order {}, checks {:?}", p.location, p.order, p.checks);
        }
        for n in &report.notes {
            println!("  {n}");
        }
    }
    Ok(())
}
