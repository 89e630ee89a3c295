use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use coset_forge::cli::{run, Cli};

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/coset.alg")
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_coset-forge")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coset-forge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn catalog_lists_every_current() {
    let (code, out) = bin(&["catalog", s(&fixture_path())]);
    assert_eq!(code, 0);
    assert!(out.contains("14 currents"));
}

#[test]
fn contract_prints_both_values() {
    let (code, out) = bin(&["contract", s(&fixture_path()), "Cp", "Cm", "--at", "1/2 - 2*i"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("quad") && out.contains("closed"));
    let rel: f64 = out
        .split("rel ")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(rel < 1e-8);
}

#[test]
fn contract_outside_the_strip_is_an_input_error() {
    let (code, out) = bin(&["contract", s(&fixture_path()), "Cp", "Cm", "--at", "3*i"]);
    assert_eq!(code, 2);
    assert!(out.contains("convergence strip"));
}

#[test]
fn selected_relations_only() {
    let cli = Cli::parse_from(["coset-forge", "verify", s(&fixture_path()), "--only", "EE,FF", "--hbar", "1"]);
    let o = run(&cli);
    assert_eq!(o.code, 0);
    let ids: Vec<String> = o.reports.unwrap().reports.iter().map(|r| r.id.clone()).collect();
    assert_eq!(ids, vec!["EE", "FF"]);
}

#[test]
fn level_override_and_tolerance_flags() {
    for k in ["1", "2", "5/2"] {
        let cli = Cli::parse_from(["coset-forge", "verify", "--all", s(&fixture_path()), "--k", k, "--tol", "1e-9"]);
        let o = run(&cli);
        assert_eq!(o.code, 0, "k = {k}\n{}", o.stdout);
    }
}

#[test]
fn unknown_rotation_is_a_config_error() {
    let (code, out) = bin(&["verify", s(&fixture_path()), "--rotate", "sideways"]);
    assert_eq!(code, 2);
    assert!(out.contains("sideways"));
}

#[test]
fn parse_errors_exit_two_with_a_json_object() {
    let bad = scratch("bad.alg", "params { k = 2 }\nkernel c = sinh(");
    let json = bad.with_extension("json");
    let (code, out) = bin(&["verify", s(&bad), "--json", s(&json)]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("2:17"));
    assert_eq!(std::fs::read_to_string(&json).unwrap(), out);
}

#[test]
fn undeclared_names_exit_two() {
    let bad = scratch("undeclared.alg", "params { k = 2 }\nrelation r: A B shape\n");
    let (code, out) = bin(&["verify", s(&bad)]);
    assert_eq!(code, 2);
    assert!(out.contains("undeclared name `A`"));
}

#[test]
fn poles_reports_the_derived_residues() {
    let (code, out) = bin(&["poles", s(&fixture_path()), "--hbar", "1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("w = -3/2ℏ") && out.contains("w = 3/2ℏ"));
}

#[test]
fn limit_with_custom_sequence() {
    let (code, out) = bin(&["limit", s(&fixture_path()), "--hbar", "1/50,1/500,1/5000"]);
    assert_eq!(code, 0, "{out}");
    let (code, _) = bin(&["limit", s(&fixture_path()), "--hbar", "1/50,1/500"]);
    assert_eq!(code, 2);
}

#[test]
fn report_json_is_schema_shaped() {
    let (code, out) = bin(&["report", s(&fixture_path()), "--hbar", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], "1.0");
    for key in ["relations", "residuals", "poles", "limit_fits"] {
        assert!(v[key].is_array(), "{key}");
    }
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["limit_fits"].as_array().unwrap().len(), 3);
    assert_eq!(v["poles"].as_array().unwrap().len(), 2);
}
