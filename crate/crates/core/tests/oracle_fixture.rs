//! The shipped oracle fixture against the built-in table and the pipeline.

use std::collections::BTreeMap;

use serde::Deserialize;

use symstrat_core::foxneuwirth::{conf_space_spec, DEFAULT_LIMIT};
use symstrat_core::homology::{Coefficients, GradedGroups, HomologyGroup};
use symstrat_core::oracles::{record_matches, small_space_table, ORACLE_TABLE_VERSION};
use symstrat_core::partitions::ColourVector;
use symstrat_core::verify::{space_groups, GroupKind};

#[derive(Deserialize)]
struct Fixture {
    version: u32,
    records: Vec<Record>,
}

#[derive(Deserialize)]
struct Record {
    space: String,
    colours: Vec<u32>,
    complete: bool,
    betti: BTreeMap<usize, usize>,
}

fn fixture() -> Fixture {
    serde_json::from_str(include_str!("fixtures/oracles.json")).unwrap()
}

fn expected(r: &Record) -> GradedGroups {
    r.betti.iter().map(|(&k, &b)| (k, HomologyGroup::free(b))).collect()
}

#[test]
fn fixture_matches_built_in_table() {
    let f = fixture();
    assert_eq!(f.version, ORACLE_TABLE_VERSION);
    let table = small_space_table().unwrap();
    assert_eq!(table.len(), f.records.len());
    for (t, r) in table.iter().zip(&f.records) {
        assert_eq!(t.space, r.space);
        assert_eq!(t.spec, conf_space_spec(&ColourVector::new(r.colours.clone())));
        assert_eq!(t.complete, r.complete);
        let zero = HomologyGroup::default();
        let want = expected(r);
        for k in t.expected.keys().chain(want.keys()) {
            assert_eq!(t.expected.get(k).unwrap_or(&zero), want.get(k).unwrap_or(&zero), "{} degree {k}", r.space);
        }
    }
}

#[test]
fn pipeline_reproduces_fixture() {
    for (t, r) in small_space_table().unwrap().iter().zip(&fixture().records) {
        let got = space_groups(&t.spec, Coefficients::Integers, GroupKind::Homology, DEFAULT_LIMIT).unwrap();
        assert!(record_matches(t, &got), "{}", r.space);
        let zero = HomologyGroup::default();
        for (k, g) in expected(r) {
            assert_eq!(got.get(&k).unwrap_or(&zero), &g, "{} degree {k}", r.space);
        }
    }
}
