//! Edge decks, vertex decks, and deck matrices.
//!
//! The edge-deck matrix of stratum `(v, n)` has one column per class with `n`
//! edges and one row per class with `n - 1` edges (both on `v` vertices);
//! entry `(i, j)` counts how often row class `i` appears in the edge deck of
//! column class `j`. Its integer kernel is the kernel of the deck
//! homomorphism restricted to the stratum.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::IntMatrix;
use crate::cache::CatalogStore;
use crate::catalog::{max_edges, StratumCatalog};
use crate::error::{Error, Result};
use crate::graph::{delete_edge, delete_vertex, CanonicalGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeckKind {
    Edge,
    Vertex,
}

impl std::str::FromStr for DeckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(DeckKind::Edge),
            "vertex" => Ok(DeckKind::Vertex),
            other => Err(Error::input(format!("unknown deck kind {other:?} (expected edge or vertex)"))),
        }
    }
}

/// A multiset of cards, kept as sorted `(card, multiplicity)` pairs so that
/// deck equality is plain vector equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Deck {
    kind: DeckKind,
    cards: Vec<(CanonicalGraph, usize)>,
}

impl Deck {
    pub fn from_cards(kind: DeckKind, cards: impl IntoIterator<Item = CanonicalGraph>) -> Self {
        let mut counts: BTreeMap<CanonicalGraph, usize> = BTreeMap::new();
        for card in cards {
            *counts.entry(card).or_default() += 1;
        }
        Deck {
            kind,
            cards: counts.into_iter().collect(),
        }
    }

    /// Multiset union; decks of different kinds cannot be combined.
    pub fn union(&self, other: &Deck) -> Result<Deck> {
        if self.kind != other.kind {
            return Err(Error::input("cannot combine an edge deck with a vertex deck"));
        }
        let mut counts: BTreeMap<CanonicalGraph, usize> = self.cards.iter().cloned().collect();
        for (card, m) in &other.cards {
            *counts.entry(card.clone()).or_default() += m;
        }
        Ok(Deck {
            kind: self.kind,
            cards: counts.into_iter().collect(),
        })
    }

    pub fn empty(kind: DeckKind) -> Self {
        Deck {
            kind,
            cards: Vec::new(),
        }
    }

    pub fn kind(&self) -> DeckKind {
        self.kind
    }

    pub fn cards(&self) -> &[(CanonicalGraph, usize)] {
        &self.cards
    }

    /// Number of cards counted with multiplicity.
    pub fn total(&self) -> usize {
        self.cards.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, card: &CanonicalGraph) -> usize {
        self.cards
            .binary_search_by(|(c, _)| c.cmp(card))
            .map_or(0, |i| self.cards[i].1)
    }

    /// `[[card, multiplicity], ...]` as used in JSON exports.
    pub fn to_pairs(&self) -> Vec<(String, usize)> {
        self.cards.iter().map(|(c, m)| (c.to_string(), *m)).collect()
    }

    pub fn from_pairs(kind: DeckKind, pairs: &[(String, usize)]) -> Result<Deck> {
        let mut cards = Vec::new();
        for (s, m) in pairs {
            if *m == 0 {
                return Err(Error::input(format!("card {s} has multiplicity zero")));
            }
            let g = CanonicalGraph::parse_canonical(s)?;
            cards.extend(std::iter::repeat_n(g, *m));
        }
        Ok(Deck::from_cards(kind, cards))
    }
}

/// Multiset of one-edge-deleted subgraphs; every card keeps all vertices.
pub fn edge_deck(g: &CanonicalGraph) -> Result<Deck> {
    if g.edge_count() == 0 {
        return Err(Error::input(format!("{g} has no edges, so it has no edge deck")));
    }
    let cards = (0..g.edge_count())
        .map(|i| delete_edge(g, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Deck::from_cards(DeckKind::Edge, cards))
}

/// Multiset of one-vertex-deleted subgraphs.
pub fn vertex_deck(g: &CanonicalGraph) -> Result<Deck> {
    if g.vertex_count() == 0 {
        return Err(Error::input("the empty graph has no vertex deck"));
    }
    let cards = (0..g.vertex_count())
        .map(|u| delete_vertex(g, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(Deck::from_cards(DeckKind::Vertex, cards))
}

pub fn deck_of(kind: DeckKind, g: &CanonicalGraph) -> Result<Deck> {
    match kind {
        DeckKind::Edge => edge_deck(g),
        DeckKind::Vertex => vertex_deck(g),
    }
}

/// The deck homomorphism of one stratum as an exact integer matrix.
#[derive(Clone, Debug)]
pub struct DeckMatrix {
    v: usize,
    n: usize,
    kind: DeckKind,
    rows: Vec<CanonicalGraph>,
    row_index: HashMap<CanonicalGraph, usize>,
    cols: StratumCatalog,
    entries: IntMatrix,
}

impl DeckMatrix {
    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DeckKind {
        self.kind
    }

    pub fn rows(&self) -> &[CanonicalGraph] {
        &self.rows
    }

    pub fn row_position(&self, g: &CanonicalGraph) -> Option<usize> {
        self.row_index.get(g).copied()
    }

    pub fn cols(&self) -> &StratumCatalog {
        &self.cols
    }

    pub fn entries(&self) -> &IntMatrix {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.entries.column(j)
    }

    /// Applies the deck homomorphism to a coefficient vector over the columns.
    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        self.entries.mul_vec(x)
    }

    pub fn to_export(&self) -> MatrixExport {
        MatrixExport {
            v: self.v,
            n: self.n,
            kind: self.kind,
            rows: self.rows.iter().map(|g| g.to_string()).collect(),
            cols: self.cols.iter().map(|g| g.to_string()).collect(),
            entries: self.entries.entries().iter().map(|x| x.to_string()).collect(),
        }
    }

    /// CSV with a header row of column classes and one labeled line per row class.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::input(format!("csv export: {e}"));
        let mut header = vec![String::new()];
        header.extend(self.cols.iter().map(|g| g.to_string()));
        out.write_record(&header).map_err(csv_err)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut record = vec![row.to_string()];
            record.extend(self.entries.row(i).iter().map(|x| x.to_string()));
            out.write_record(&record).map_err(csv_err)?;
        }
        let bytes = out
            .into_inner()
            .map_err(|e| Error::input(format!("csv export: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// JSON shape of an exported deck matrix; entries are row-major decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixExport {
    pub v: usize,
    pub n: usize,
    pub kind: DeckKind,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<String>,
}

/// Builds the deck matrix of stratum `(v, n)`.
///
/// For vertex decks the columns are still the classes with `v` vertices and `n`
/// edges; rows are all classes on `v - 1` vertices whose edge count can occur
/// as a card.
pub fn deck_matrix(v: usize, n: usize, kind: DeckKind, store: &CatalogStore) -> Result<DeckMatrix> {
    let cols = store.stratum(v, n)?;
    let rows: Vec<CanonicalGraph> = match kind {
        DeckKind::Edge => {
            if n == 0 {
                return Err(Error::input(format!(
                    "stratum (v={v}, n=0): edgeless graphs have no edge deck"
                )));
            }
            store.stratum(v, n - 1)?.classes().to_vec()
        }
        DeckKind::Vertex => {
            if v == 0 {
                return Err(Error::input("stratum (v=0): the empty graph has no vertex deck"));
            }
            let lowest = n.saturating_sub(v - 1);
            let highest = n.min(max_edges(v - 1));
            let mut rows = Vec::new();
            for m in lowest..=highest {
                rows.extend(store.stratum(v - 1, m)?.classes().iter().cloned());
            }
            rows.sort();
            rows
        }
    };
    let cells = rows.len() as u64 * cols.len() as u64;
    let limit = store.limits().max_matrix_cells;
    if cells > limit {
        return Err(Error::resource(
            format!("deck matrix for stratum (v={v}, n={n}) has {cells} cells"),
            limit,
        ));
    }
    let row_index: HashMap<CanonicalGraph, usize> =
        rows.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();

    let decks: Vec<Deck> = cols
        .classes()
        .par_iter()
        .map(|g| deck_of(kind, g))
        .collect::<Result<_>>()?;
    let mut entries = IntMatrix::zeros(rows.len(), cols.len());
    for (j, deck) in decks.iter().enumerate() {
        for (card, m) in deck.cards() {
            let i = *row_index.get(card).ok_or_else(|| {
                Error::invariant(format!(
                    "card {card} of {} is missing from the row catalog",
                    cols.classes()[j]
                ))
            })?;
            entries.set(i, j, BigInt::from(*m));
        }
    }
    Ok(DeckMatrix {
        v,
        n,
        kind,
        rows,
        row_index,
        cols,
        entries,
    })
}

/// Pairs `(i, j)`, `i < j`, of columns with identical entries.
pub fn duplicate_columns(m: &DeckMatrix) -> Vec<(usize, usize)> {
    let mut groups: HashMap<Vec<BigInt>, Vec<usize>> = HashMap::new();
    for j in 0..m.cols.len() {
        groups.entry(m.column(j)).or_default().push(j);
    }
    let mut pairs: Vec<(usize, usize)> = groups
        .values()
        .filter(|g| g.len() > 1)
        .flat_map(|g| {
            g.iter()
                .enumerate()
                .flat_map(move |(a, &i)| g[a + 1..].iter().map(move |&j| (i, j)))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Non-isomorphic classes of stratum `(v, n)` sharing an edge deck. An empty
/// result certifies edge reconstructibility within the stratum.
pub fn erc_scan(v: usize, n: usize, store: &CatalogStore) -> Result<Vec<(CanonicalGraph, CanonicalGraph)>> {
    let m = deck_matrix(v, n, DeckKind::Edge, store)?;
    Ok(scan_pairs(&m))
}

pub fn scan_pairs(m: &DeckMatrix) -> Vec<(CanonicalGraph, CanonicalGraph)> {
    let classes = m.cols.classes();
    duplicate_columns(m)
        .into_iter()
        .map(|(i, j)| (classes[i].clone(), classes[j].clone()))
        .collect()
}

/// Sum of column entries, as machine integers (entries are card counts).
pub fn column_sums(m: &DeckMatrix) -> Vec<u64> {
    (0..m.cols.len())
        .map(|j| {
            m.column(j)
                .iter()
                .map(|x| x.to_u64().expect("deck counts are small nonnegative integers"))
                .sum()
        })
        .collect()
}
