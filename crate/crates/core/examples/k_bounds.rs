//! Smallest colliding multiset sizes, directly and through composed witnesses.

use deckforge::kernel_search::min_mass_exact;
use deckforge::verify::compose_all;
use deckforge::{CatalogStore, Limits};

fn main() -> deckforge::Result<()> {
    let store = CatalogStore::uncached(Limits::default());
    for (v, n, cap) in [(4, 2, 2), (4, 3, 2), (8, 4, 2), (8, 5, 2)] {
        let r = min_mass_exact(v, n, cap, &store)?;
        println!("(v={v}, n={n}): k = {:?}, exhaustive up to {}", r.k, r.exhaustive_up_to);
    }
    for (n, w) in compose_all(9, &store)? {
        let (v, _) = w.stratum();
        println!("k_{n} <= {} (witness on {v} vertices)", w.k());
    }
    Ok(())
}
