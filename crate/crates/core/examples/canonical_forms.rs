//! Canonical forms are stable under relabeling; catalogs count classes per stratum.

use deckforge::catalog::max_edges;
use deckforge::graph::{automorphism_count, canonicalize};
use deckforge::{CatalogStore, Limits, RawGraph};

fn main() -> deckforge::Result<()> {
    let c4 = RawGraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)])?;
    let shuffled = c4.relabel(&[2, 0, 3, 1])?;
    let g = canonicalize(&c4);
    assert_eq!(g, canonicalize(&shuffled));
    println!("{c4} and {shuffled} both canonicalize to {g}, |Aut| = {}", automorphism_count(&g));

    let store = CatalogStore::uncached(Limits::default());
    for v in 1..=7 {
        let counts: Vec<usize> = (0..=max_edges(v))
            .map(|n| store.stratum(v, n).map(|c| c.len()))
            .collect::<deckforge::Result<_>>()?;
        println!("v={v}: {} classes, by edge count {counts:?}", counts.iter().sum::<usize>());
    }
    Ok(())
}
