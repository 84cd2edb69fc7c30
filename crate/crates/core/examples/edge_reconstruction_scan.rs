//! Equal-deck pairs: two at 2 and 3 edges, none on the larger strata.

use deckforge::deck::erc_scan;
use deckforge::verify::scanned_strata;
use deckforge::{CatalogStore, Limits};

fn main() -> deckforge::Result<()> {
    let store = CatalogStore::uncached(Limits::default());
    for (v, n) in [(4, 2), (4, 3)] {
        for (a, b) in erc_scan(v, n, &store)? {
            println!("(v={v}, n={n}): {a} and {b} share an edge deck");
        }
    }
    for (v, n) in scanned_strata() {
        let pairs = erc_scan(v, n, &store)?;
        println!("(v={v}, n={n}): {} pairs, catalog size {}", pairs.len(), store.stratum(v, n)?.len());
    }
    Ok(())
}
