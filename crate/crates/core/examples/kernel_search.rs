//! Kernel of the edge-deck matrix at 8 vertices and 4 edges, and its lightest elements.

use deckforge::abelian::kernel_basis;
use deckforge::deck::{deck_matrix, DeckKind};
use deckforge::kernel_search::kernel_mass_search;
use deckforge::{CatalogStore, KernelElement, Limits};

fn main() -> deckforge::Result<()> {
    let store = CatalogStore::uncached(Limits::default());
    let m = deck_matrix(8, 4, DeckKind::Edge, &store)?;
    let basis = kernel_basis(m.entries());
    println!("{} x {} matrix, kernel rank {}", m.rows().len(), m.cols().len(), basis.len());
    for b in &basis {
        println!("  basis: {}", KernelElement::from_vector(m.cols(), b)?.to_graded());
    }
    let found = kernel_mass_search(&m, &basis, 1, store.limits())?;
    for x in found.iter().take(5) {
        println!("  mass {}: {}", x.mass(), x.to_graded());
    }
    Ok(())
}
