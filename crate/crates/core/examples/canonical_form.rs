//! Exact equality of exponential-trigonometric mode functions.

use coset_forge::modes::{ExpTrigTerm, ModeFunction};
use coset_forge::rational::{q, qi, GaussQ};

fn main() -> coset_forge::Result<()> {
    // sinh(2x)/sinh(x) = e^x + e^{−x}
    let double = ModeFunction::new(
        "u",
        vec![ExpTrigTerm::new(GaussQ::int(1), 0, qi(0), vec![(qi(2), 1), (qi(1), -1)], qi(0))?],
        vec![],
    );
    let cosh = ModeFunction::new(
        "u",
        vec![ExpTrigTerm::exponential(GaussQ::int(1), 0, qi(1)), ExpTrigTerm::exponential(GaussQ::int(1), 0, qi(-1))],
        vec![],
    );
    println!("{double}\n  equals\n{cosh}\n  : {}", double.equals(&cosh)?);

    // e^{x/2}/sinh(x) − e^{−x/2}/sinh(x) = 1/cosh(x/2) is not e^{x/2}
    let diff = ModeFunction::new(
        "u",
        vec![
            ExpTrigTerm::new(GaussQ::int(1), 0, q(1, 2), vec![(qi(1), -1)], qi(0))?,
            ExpTrigTerm::new(GaussQ::int(-1), 0, q(-1, 2), vec![(qi(1), -1)], qi(0))?,
        ],
        vec![],
    );
    let half = ModeFunction::new("u", vec![ExpTrigTerm::exponential(GaussQ::int(1), 0, q(1, 2))], vec![]);
    println!("{diff} == {half}: {}", diff.equals(&half)?);
    println!("f − f canonicalises to zero: {}", diff.add(&diff.negated())?.canonicalize()?.is_zero());
    Ok(())
}
