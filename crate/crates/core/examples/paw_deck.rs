//! The edge deck of the paw: a triangle, a claw and two paths.

use deckforge::deck::{edge_deck, vertex_deck};
use deckforge::named::paw;

fn main() -> deckforge::Result<()> {
    let g = paw();
    println!("edge deck of {g}:");
    for (card, m) in edge_deck(&g)?.cards() {
        println!("  {m} x {card}");
    }
    println!("vertex deck of {g}:");
    for (card, m) in vertex_deck(&g)?.cards() {
        println!("  {m} x {card}");
    }
    Ok(())
}
