//! Reconstruction problems over finite catalogs: decks, properties and size strata.

use std::collections::BTreeSet;

use deckforge::recon::{
    check_size_reconstruction_theorem, deck_finite_setting, edge_deck_decomposition, edge_deck_setting,
    is_recognizable, is_reconstructable, property_setting, validate_atomic, SizeMap,
};
use deckforge::{CatalogStore, DeckKind, Limits};

fn main() -> deckforge::Result<()> {
    let store = CatalogStore::uncached(Limits::default());
    for (v, n) in [(4, 2), (6, 4)] {
        let s = deck_finite_setting(DeckKind::Edge, v, n, &store)?;
        println!("edge decks at (v={v}, n={n}): {:?}", is_reconstructable(&s));
        let degrees = property_setting(v, n, &store, |g| {
            let mut d = g.degrees();
            d.sort();
            format!("{d:?}")
        })?;
        println!("  degree sequence recognizable: {}", is_recognizable(&degrees, &s)?);
    }
    let atomic = edge_deck_setting(5, 4, &store)?;
    println!("atomic setting at (5, 4): violation {:?}", validate_atomic(&atomic));

    let decomposed: BTreeSet<usize> = [4, 5].into();
    let d = edge_deck_decomposition(5, 5, &decomposed, &store)?;
    let sz = SizeMap::edge_count(&d)?;
    println!("size strata agree, reconstructable: {}", check_size_reconstruction_theorem(&d, &sz)?);
    Ok(())
}
