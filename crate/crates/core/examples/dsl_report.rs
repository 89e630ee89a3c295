//! Parse a definition file, verify every relation and print the JSON report.
//!
//! `cargo run --example dsl_report -- path/to/file.alg`; defaults to the
//! shipped fixture.

use coset_forge::algebra::{ReportSet, VerifyOptions};
use coset_forge::cli::verify_relations;
use coset_forge::dsl::{lower, parse_definitions, print};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/coset.alg").to_string());
    let text = std::fs::read_to_string(&path)?;
    let file = parse_definitions(&text)?;
    println!("canonical form of {path}:\n{}", print(&file));

    let defs = lower(&file, None)?;
    let reports = verify_relations(&defs, &VerifyOptions::default(), &[])?;
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let set = ReportSet { params: Default::default(), reports };
    let json = set.to_json_string();
    println!("all pass: {}; JSON report is {} bytes, head:\n{}", set.all_pass(), json.len(), &json[..json.len().min(400)]);

    match parse_definitions("params { k = 2 }\nkernel c = sinh(") {
        Err(e) => println!("diagnostic for a truncated file: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
