mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use svetlichny::graphs::{ordered_pairs, GraphClass, CATALOG_NAMES};
use svetlichny::{catalog, classify, is_separable, Classification, CommGraph};

use common::{deps_from_edges, oracle_is_pp, oracle_separable};

fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

fn cat(name: &str) -> CommGraph {
    catalog(name, None, None).unwrap()
}

#[test]
fn fig1_iii_dependencies() {
    let d = cat("fig1_iii").dependency_sets();
    assert_eq!(d.set(1), set(&[1, 2, 3]));
    assert_eq!(d.set(3), set(&[1, 2, 3]));
    assert_eq!(d.set(2), set(&[1, 2, 4]));
    assert_eq!(d.set(4), set(&[1, 2, 4]));
}

#[test]
fn catalog_classes() {
    let expect = [
        ("fig1_i", GraphClass::PP),
        ("fig1_iia", GraphClass::PP),
        ("fig1_iib", GraphClass::PP),
        ("fig1_iii", GraphClass::PP),
        ("fig1_iva", GraphClass::TP),
        ("fig1_ivb", GraphClass::TP),
        ("fig1_v", GraphClass::TP),
        ("three_party_pp", GraphClass::PP),
    ];
    for (name, class) in expect {
        assert_eq!(classify(&cat(name)).unwrap().class(), class, "{name}");
    }
}

#[test]
fn witnesses() {
    assert_eq!(classify(&cat("fig1_i")).unwrap(), Classification::PartiallyPaired { pair: (1, 2) });
    assert_eq!(classify(&cat("fig1_iii")).unwrap(), Classification::PartiallyPaired { pair: (3, 4) });
    assert_eq!(classify(&cat("three_party_pp")).unwrap(), Classification::PartiallyPaired { pair: (1, 3) });
    match classify(&cat("fig1_iva")).unwrap() {
        Classification::TotallyPaired { cover } => {
            assert_eq!(cover.len(), 6);
            assert!(cover.iter().all(|&(_, k)| k == 1));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn separability() {
    assert!(is_separable(&cat("fig1_iia")));
    assert!(is_separable(&cat("fig1_iib")));
    assert!(is_separable(&cat("fig1_i")));
    assert!(!is_separable(&cat("fig1_iii")));
    assert!(!is_separable(&cat("three_party_pp")));
    assert!(!is_separable(&cat("fig1_v")));
}

#[test]
fn fig2_family() {
    for m in 4..=8 {
        for k in 2..=m - 2 {
            let g = catalog("fig2", Some(m), Some(k)).unwrap();
            assert!(!g.has_edge(1, m) && !g.has_edge(m, 1), "m={m} k={k}");
            let d = g.dependency_sets();
            assert!((1..=m).all(|i| !(d.set(i).contains(&1) && d.set(i).contains(&m))));
            assert_eq!(classify(&g).unwrap(), Classification::PartiallyPaired { pair: (1, m) });
            assert!(!is_separable(&g));
        }
    }
    assert!(catalog("fig2", Some(6), Some(1)).is_err());
    assert!(catalog("fig2", Some(6), Some(5)).is_err());
    assert!(catalog("fig2", Some(6), None).is_err());
}

#[test]
fn catalog_names_resolve() {
    for name in CATALOG_NAMES {
        let g = catalog(name, Some(5), Some(2));
        assert!(g.is_ok(), "{name}");
    }
    assert!(catalog("fig9", None, None).is_err());
}

#[test]
fn three_party_exhaustive() {
    let pairs = ordered_pairs(3);
    assert_eq!(pairs.len(), 6);
    let mut pp = 0;
    for code in 0..64u64 {
        let g = CommGraph::from_code(3, code).unwrap();
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| code >> b & 1 == 1).map(|(_, &p)| p).collect();
        assert_eq!(g.edges(), edges);
        let deps = deps_from_edges(3, &edges);
        let class = classify(&g).unwrap();
        assert_eq!(class.class() == GraphClass::PP, oracle_is_pp(&deps), "code {code}");
        assert_eq!(is_separable(&g), oracle_separable(3, &edges), "code {code}");
        pp += (class.class() == GraphClass::PP) as usize;
    }
    // With three parties a pair is covered by an edge between its members in
    // either direction, or by the third party hearing both.
    let tp_oracle = (0..64u64)
        .filter(|&code| {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| code >> b & 1 == 1).map(|(_, &p)| p).collect();
            let linked = |i, j| edges.contains(&(i, j)) || edges.contains(&(j, i));
            [(1, 2, 3), (1, 3, 2), (2, 3, 1)]
                .iter()
                .all(|&(i, j, k)| linked(i, j) || (edges.contains(&(i, k)) && edges.contains(&(j, k))))
        })
        .count();
    assert_eq!(64 - pp, tp_oracle);
}

#[test]
fn json_roundtrip_and_rejects() {
    let g = cat("fig1_ivb");
    let back = CommGraph::from_json(&g.to_json().to_string()).unwrap();
    assert_eq!(back, g);
    assert!(CommGraph::from_json(r#"{"m": 3, "edges": [[1, 4]]}"#).is_err());
    assert!(CommGraph::from_json(r#"{"m": 3, "edges": [[0, 2]]}"#).is_err());
    assert!(CommGraph::from_json(r#"{"m": 3}"#).is_err());
    // self-loops carry no information and are dropped
    let looped = CommGraph::from_json(r#"{"m": 2, "edges": [[1, 1], [1, 2]]}"#).unwrap();
    assert_eq!(looped.edges(), vec![(1, 2)]);
}

proptest! {
    #[test]
    fn classification_matches_definition(m in 2usize..=6, code in any::<u64>()) {
        let n = m * (m - 1);
        let code = code & ((1u64 << n) - 1);
        let g = CommGraph::from_code(m, code).unwrap();
        let edges = g.edges();
        let deps = deps_from_edges(m, &edges);
        prop_assert_eq!(g.dependency_sets().masks().to_vec(), deps.clone());
        let class = classify(&g).unwrap();
        prop_assert_eq!(class.class() == GraphClass::PP, oracle_is_pp(&deps));
        prop_assert_eq!(is_separable(&g), oracle_separable(m, &edges));
        match class {
            Classification::PartiallyPaired { pair: (i, j) } => {
                prop_assert!(i < j);
                prop_assert!(deps.iter().all(|&d| d >> (i - 1) & 1 == 0 || d >> (j - 1) & 1 == 0));
            }
            Classification::TotallyPaired { cover } => {
                for ((i, j), k) in cover {
                    let d = deps[k - 1];
                    prop_assert!(d >> (i - 1) & 1 == 1 && d >> (j - 1) & 1 == 1);
                    prop_assert!(deps[..k - 1].iter().all(|&e| e >> (i - 1) & 1 == 0 || e >> (j - 1) & 1 == 0));
                }
            }
        }
    }

    #[test]
    fn separable_graphs_are_pp(m in 2usize..=6, code in any::<u64>()) {
        let code = code & ((1u64 << (m * (m - 1))) - 1);
        let g = CommGraph::from_code(m, code).unwrap();
        if is_separable(&g) {
            prop_assert_eq!(classify(&g).unwrap().class(), GraphClass::PP);
        }
    }

    #[test]
    fn adding_edges_never_unpairs(m in 2usize..=6, code in any::<u64>(), i in 1usize..=6, j in 1usize..=6) {
        let code = code & ((1u64 << (m * (m - 1))) - 1);
        let (i, j) = (1 + (i - 1) % m, 1 + (j - 1) % m);
        prop_assume!(i != j);
        let g = CommGraph::from_code(m, code).unwrap();
        let h = g.with_edge(i, j).unwrap();
        if classify(&g).unwrap().is_tp() {
            prop_assert!(classify(&h).unwrap().is_tp());
        }
    }
}
