use std::path::PathBuf;

use coset_forge::algebra::{build_catalog, NormalOrderedTerm, RelationKind, CATALOG_CURRENTS};
use coset_forge::dsl::{lower, parse_definitions, print};
use coset_forge::modes::AlgebraParams;
use coset_forge::rational::{q, qi, Q};

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/coset.alg")
}

fn fixture() -> String {
    std::fs::read_to_string(fixture_path()).unwrap()
}

fn same_term(a: &NormalOrderedTerm, b: &NormalOrderedTerm) -> bool {
    a.prefactor == b.prefactor
        && a.hbar_pow == b.hbar_pow
        && a.exponents.len() == b.exponents.len()
        && a.exponents
            .iter()
            .all(|(f, g)| b.exponents.get(f).is_some_and(|h| g.equals(h).unwrap()))
}

#[test]
fn fixture_declares_the_full_catalog() {
    let file = parse_definitions(&fixture()).unwrap();
    let names: Vec<&str> = file.currents().map(|c| c.name.as_str()).collect();
    let mut want = CATALOG_CURRENTS.to_vec();
    let mut got = names.clone();
    want.sort();
    got.sort();
    assert_eq!(got, want);
    assert!(file.relations().count() >= 12);
    assert_eq!(file.limits().count(), 3);
}

#[test]
fn fixture_lowers_to_the_built_catalog() {
    let file = parse_definitions(&fixture()).unwrap();
    for k in [qi(1), qi(2), qi(3), q(5, 2)] {
        let defs = lower(&file, Some(k.clone())).unwrap();
        let built = build_catalog(&AlgebraParams::new(k.clone(), qi(1)).unwrap()).unwrap();
        assert_eq!(defs.catalog.kernels, built.kernels);
        for name in CATALOG_CURRENTS {
            let a = defs.catalog.get(name).unwrap();
            let b = built.get(name).unwrap();
            assert_eq!(a.terms.len(), b.terms.len(), "{name}");
            for t in &a.terms {
                assert!(b.terms.iter().any(|u| same_term(t, u)), "k = {k}: {name} term {t} not in built catalog");
            }
        }
    }
}

#[test]
fn fixture_round_trips() {
    let file = parse_definitions(&fixture()).unwrap();
    let text = print(&file);
    let again = parse_definitions(&text).unwrap();
    assert_eq!(file, again);
    assert_eq!(print(&again), text);
}

#[test]
fn fixture_params() {
    let defs = lower(&parse_definitions(&fixture()).unwrap(), None).unwrap();
    assert_eq!(defs.k, qi(3));
    assert_eq!(defs.hbar, vec![qi(1), q(1, 2)]);
    assert_eq!(defs.limit_hbar, vec![1e-2, 1e-3, 1e-4]);
    assert_eq!(defs.tol, Some(1e-8));
    let commutators = defs
        .relations
        .iter()
        .filter(|r| matches!(r.kind, RelationKind::Commutator { .. }))
        .count();
    assert_eq!(commutators, 2);
    let ef = defs.relations.iter().find(|r| r.id == "EF").unwrap();
    let RelationKind::Commutator { targets } = &ef.kind else { panic!() };
    let locations: Vec<Q> = targets.iter().map(|t| t.rotated_location.clone()).collect();
    assert_eq!(locations, vec![q(-3, 2), q(3, 2)]);
}
