mod common;

use std::collections::BTreeSet;

use common::*;
use deckforge::catalog::max_edges;
use deckforge::graph::{
    automorphism_count, canonicalize, delete_edge, delete_vertex, disjoint_union, CanonicalGraph,
};
use num_bigint::BigInt;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_ignores_relabeling((g, perm) in arb_graph_and_perm(8)) {
        let h = g.relabel(&perm).unwrap();
        prop_assert_eq!(canonicalize(&g), canonicalize(&h));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_matches_brute_force(g in arb_raw_graph(6)) {
        prop_assert_eq!(canonicalize(&g).to_string(), brute_canonical(&g));
    }

    #[test]
    fn canonical_string_round_trips(g in arb_canonical(8)) {
        prop_assert_eq!(CanonicalGraph::parse_canonical(g.as_str()).unwrap(), g);
    }

    #[test]
    fn deletions_change_vertex_count_as_stated(g in arb_canonical(7)) {
        for i in 0..g.edge_count() {
            prop_assert_eq!(delete_edge(&g, i).unwrap().vertex_count(), g.vertex_count());
        }
        for u in 0..g.vertex_count() {
            prop_assert_eq!(delete_vertex(&g, u).unwrap().vertex_count(), g.vertex_count() - 1);
        }
    }

    #[test]
    fn disjoint_union_laws(a in arb_canonical(4), b in arb_canonical(4), c in arb_canonical(4)) {
        let u = |x: &CanonicalGraph, y: &CanonicalGraph| disjoint_union(x, y).unwrap();
        prop_assert_eq!(u(&a, &b), u(&b, &a));
        prop_assert_eq!(u(&u(&a, &b), &c), u(&a, &u(&b, &c)));
        prop_assert_eq!(u(&a, &CanonicalGraph::empty()), a.clone());
        let ab = u(&a, &b);
        prop_assert_eq!(ab.edge_count(), a.edge_count() + b.edge_count());
        prop_assert_eq!(ab.vertex_count(), a.vertex_count() + b.vertex_count());
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

#[test]
fn orbit_stabilizer_for_small_graphs() {
    let s = store();
    for v in 0..=6 {
        for n in 0..=max_edges(v) {
            for g in s.stratum(v, n).unwrap().iter() {
                let aut = BigInt::from(automorphism_count(g).0.clone());
                assert_eq!(aut * BigInt::from(orbit_size(g)), factorial(v), "{g}");
            }
        }
    }
}

#[test]
fn enumeration_is_complete_for_small_vertex_counts() {
    let s = store();
    // Total isomorphism classes of graphs on v vertices.
    let totals = [1usize, 1, 2, 4, 11, 34, 156, 1044];
    for (v, &total) in totals.iter().enumerate() {
        let mut count = 0;
        for n in 0..=max_edges(v) {
            let cat = s.stratum(v, n).unwrap();
            count += cat.len();
            // Orbits of one stratum partition its labeled graphs.
            let labeled: BigInt = cat.iter().map(|g| factorial(v) / BigInt::from(automorphism_count(g).0.clone())).sum();
            assert_eq!(labeled, binomial(max_edges(v), n), "(v={v}, n={n})");
        }
        assert_eq!(count, total, "v={v}");
    }
}

#[test]
fn brute_force_orbit_counts_up_to_five_vertices() {
    let s = store();
    for v in 0..=5 {
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
        let mut by_edges = vec![BTreeSet::new(); pairs.len() + 1];
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
            let g = deckforge::RawGraph::new(v, edges).unwrap();
            by_edges[g.edge_count()].insert(brute_canonical(&g));
        }
        for (n, forms) in by_edges.iter().enumerate() {
            let listed: BTreeSet<String> = s.stratum(v, n).unwrap().iter().map(|g| g.to_string()).collect();
            assert_eq!(&listed, forms, "(v={v}, n={n})");
        }
    }
}
