//! Exact algebra of edge decks.
//!
//! `deckforge` enumerates isomorphism classes of finite simple graphs one
//! stratum (vertex count, edge count) at a time, builds the deck
//! homomorphism that sends a graph to the formal sum of its one-edge-deleted
//! subgraphs, and studies it with exact integer linear algebra: Smith and
//! Hermite normal forms, K0 presentations of categories with covering
//! families, kernel lattices and minimal-mass kernel elements. A small
//! framework for reconstruction problems on finite catalogs (recognizable
//! properties, the degree lattice, atomic settings and size stratification)
//! sits on top.
//!
//! The runnable programs in `examples/` walk through each capability; the
//! `deckforge` binary exposes the same operations on the command line.

pub mod abelian;
pub mod cache;
pub mod catalog;
pub mod config;
pub mod deck;
pub mod error;
pub mod graph;
pub mod kernel_search;
pub mod named;
pub mod recon;
pub mod ring;
pub mod verify;

mod bigint_serde;

pub use abelian::{IntMatrix, K0Group, K0Presentation};
pub use cache::CatalogStore;
pub use catalog::{enumerate_stratum, StratumCatalog};
pub use config::{Limits, RunConfig};
pub use deck::{Deck, DeckKind, DeckMatrix};
pub use error::{Error, Result};
pub use graph::{CanonicalGraph, RawGraph};
pub use kernel_search::{GercWitness, KernelElement};
pub use ring::GradedElement;
