mod oracle;

use std::collections::BTreeMap;

use proptest::prelude::*;

use exigraph_core::kb::{EntityId, Kb, Provenance};
use exigraph_core::logic3::Value3;

fn value_of(tv: oracle::Tv) -> Value3 {
    match tv {
        oracle::TV_FALSE => Value3::False,
        oracle::TV_UNKNOWN => Value3::Unknown,
        _ => Value3::True,
    }
}

fn graph() -> impl Strategy<Value = (usize, BTreeMap<(usize, usize), oracle::Tv>)> {
    (2usize..=6).prop_flat_map(|n| {
        (Just(n), prop::collection::btree_map((1..n, 0..n), 0u8..3, 0..12))
    })
}

fn build(n: usize, edges: &BTreeMap<(usize, usize), oracle::Tv>) -> (Kb, Vec<EntityId>) {
    let mut kb = Kb::new();
    let mut ids = vec![kb.root()];
    ids.extend((1..n).map(|i| kb.upsert_entity(&format!("e{i}")).unwrap()));
    for (&(f, t), &v) in edges {
        kb.assert_membership(ids[f], ids[t], value_of(v), Provenance::asserted()).unwrap();
    }
    (kb, ids)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn degree_matches_chain_enumeration((n, edges) in graph()) {
        let (kb, ids) = build(n, &edges);
        for s in 1..n {
            prop_assert_eq!(kb.existence_degree(ids[s], ids[0]), value_of(oracle::chain_degree(&edges, s, 0)), "from e{}", s);
        }
    }

    #[test]
    fn unreachable_root_is_never_true((n, edges) in graph()) {
        let (kb, ids) = build(n, &edges);
        for s in 1..n {
            if !oracle::reaches(&edges, s, 0) {
                prop_assert_ne!(kb.existence_degree(ids[s], ids[0]), Value3::True);
            }
        }
    }
}

#[test]
fn pure_cycle_is_unknown() {
    let edges = BTreeMap::from([((1, 2), oracle::TV_TRUE), ((2, 1), oracle::TV_TRUE)]);
    let (kb, ids) = build(3, &edges);
    assert_eq!(kb.existence_degree(ids[1], ids[0]), Value3::Unknown);
}

#[test]
fn a_false_link_on_the_only_chain_is_false() {
    let edges = BTreeMap::from([((1, 2), oracle::TV_FALSE), ((2, 0), oracle::TV_TRUE)]);
    let (kb, ids) = build(3, &edges);
    assert_eq!(kb.existence_degree(ids[1], ids[0]), Value3::False);
    assert_eq!(kb.existence_degree(ids[2], ids[0]), Value3::True);
}
