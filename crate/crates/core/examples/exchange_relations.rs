//! Exchange relations of the catalog currents, including the composite
//! nonlocal ones and the Drinfeld currents.

use coset_forge::algebra::{build_catalog, current_exchange, Rotation};
use coset_forge::modes::AlgebraParams;
use coset_forge::rational::qi;

fn main() -> coset_forge::Result<()> {
    let cat = build_catalog(&AlgebraParams::new(qi(3), qi(1))?)?;
    let pairs = [
        ("Cp", "Cp", Rotation::None),
        ("Bp", "Bm", Rotation::None),
        ("Psi", "Psi", Rotation::Global),
        ("Psi", "PsiDag", Rotation::Global),
        ("Hp", "Hm", Rotation::Global),
        ("E", "E", Rotation::Global),
    ];
    for (a, b, rot) in pairs {
        let ex = current_exchange(&cat, cat.get(a)?, cat.get(b)?, rot)?;
        println!(
            "{a}(u){b}(v) = S·{b}(v){a}(u), {} term pair(s), consistent: {}\n  S = {}",
            ex.factors.len(),
            ex.consistent(),
            ex.first().canonical()
        );
    }
    Ok(())
}
