mod common;

use common::*;
use deckforge::abelian::kernel_basis;
use deckforge::catalog::max_edges;
use deckforge::deck::{deck_matrix, erc_scan, DeckKind};
use deckforge::kernel_search::{
    kernel_mass_search, mass_two_collisions, min_mass_exact, verify_kernel_element, WitnessFile,
};
use deckforge::named::{cherry, two_edges};
use deckforge::verify::compose_all;
use deckforge::graph::disjoint_union;
use deckforge::{CanonicalGraph, GercWitness, KernelElement};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

#[test]
fn mass_one_matches_the_deck_scan() {
    let s = store();
    for v in 2..=7 {
        for n in 1..=max_edges(v) {
            let r = min_mass_exact(v, n, 1, &s).unwrap();
            let pairs = erc_scan(v, n, &s).unwrap();
            assert_eq!(r.k == Some(1), !pairs.is_empty(), "(v={v}, n={n})");
            assert_eq!(r.exhaustive_up_to, 1);
        }
    }
}

#[test]
fn box_search_results_verify_both_ways() {
    let s = store();
    for (v, n) in [(4, 2), (4, 3), (5, 3), (8, 4)] {
        let m = deck_matrix(v, n, DeckKind::Edge, &s).unwrap();
        let basis = kernel_basis(m.entries());
        let found = kernel_mass_search(&m, &basis, 1, s.limits()).unwrap();
        assert!(!found.is_empty(), "(v={v}, n={n})");
        for x in &found {
            assert!(verify_kernel_element(x).unwrap());
            let col = x.to_vector(m.cols()).unwrap();
            assert!(m.apply(&col).unwrap().iter().all(Zero::is_zero));
            let sum: BigInt = x.coefficients().values().sum();
            assert!(sum.is_zero());
        }
    }
}

#[test]
fn known_pair_is_a_mass_two_collision_at_eight_vertices() {
    let s = store();
    let u = |a: &CanonicalGraph, b: &CanonicalGraph| disjoint_union(a, b).unwrap();
    let (ii, l) = (two_edges(), cherry());
    let mut left = [u(&ii, &ii), u(&l, &l)];
    left.sort();
    let right = [u(&ii, &l), u(&ii, &l)];
    let groups = mass_two_collisions(8, 4, &s).unwrap();
    assert!(groups.iter().any(|g| g.contains(&left) && g.contains(&right)));
    assert_eq!(min_mass_exact(8, 4, 2, &s).unwrap().k, Some(2));
}

#[test]
fn witness_files_round_trip() {
    let s = store();
    for w in compose_all(6, &s).unwrap().values() {
        let text = serde_json::to_string(&w.to_file()).unwrap();
        let back = GercWitness::from_file(&serde_json::from_str::<WitnessFile>(&text).unwrap()).unwrap();
        assert_eq!(&back, w);
    }
}

#[test]
fn tampered_witness_files_are_rejected() {
    let s = store();
    let w = min_mass_exact(4, 2, 1, &s).unwrap().witness.unwrap();
    let mut f = w.to_file();
    f.combined_deck[0].1 += 1;
    assert!(GercWitness::from_file(&f).is_err());
    let mut f = w.to_file();
    f.right = f.left.clone();
    assert!(GercWitness::from_file(&f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 60, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn failures_persist_at_larger_mass(base in 0usize..2, picks in proptest::collection::vec(0usize..64, 1..4)) {
        let s = store();
        let (v, n) = [(4, 2), (4, 3)][base];
        let classes = s.stratum(v, n).unwrap().classes().to_vec();
        let mut w = min_mass_exact(v, n, 1, &s).unwrap().witness.unwrap();
        for p in picks {
            let k = w.k();
            w = w.pad(&classes[p % classes.len()]).unwrap();
            prop_assert_eq!(w.k(), k + 1);
            prop_assert!(verify_kernel_element(&w.to_kernel_element()).unwrap());
        }
    }

    #[test]
    fn single_graphs_are_never_kernel_elements(g in arb_canonical(6)) {
        prop_assume!(g.edge_count() > 0);
        let x = KernelElement::new(g.vertex_count(), g.edge_count(), [(g.clone(), BigInt::from(1))]).unwrap();
        prop_assert!(!verify_kernel_element(&x).unwrap());
    }
}
