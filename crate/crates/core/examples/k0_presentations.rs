//! K0 of the deck covering structure and of the edge-partition structure.

use deckforge::abelian::{build_deck_presentation, build_gamma_leq_presentation, present_k0};
use deckforge::{CatalogStore, Limits};

fn main() -> deckforge::Result<()> {
    let store = CatalogStore::uncached(Limits::default());
    for (v, n) in [(4, 2), (4, 3), (6, 4), (7, 5)] {
        let p = build_deck_presentation(v, n, &store)?;
        let k0 = present_k0(&p, store.limits())?;
        println!(
            "deck (v={v}, n={n}): {} generators, free rank {}, torsion {:?}",
            p.generators().len(),
            k0.free_rank(),
            k0.torsion()
        );
    }
    let p = build_gamma_leq_presentation(6, 5, &store)?;
    let k0 = present_k0(&p, store.limits())?;
    println!("edge partitions up to (6, 5): free rank {}, torsion {:?}", k0.free_rank(), k0.torsion());
    for label in ["G2:0-1", "G4:0-1,0-2", "G6:0-1,0-2,1-2,3-4"] {
        println!("  [{label}] -> {:?}", k0.class_of(label).unwrap_or_default());
    }
    Ok(())
}
