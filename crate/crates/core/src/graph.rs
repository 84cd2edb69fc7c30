//! Finite simple graphs and their canonical forms.
//!
//! A graph is stored as a vertex count plus a sorted list of edges `(a, b)`
//! with `a < b`. The canonical representative of an isomorphism class is the
//! relabeling whose sorted edge list is lexicographically smallest. Graphs are
//! written as `G{v}:{a}-{b},{a}-{b},...`, e.g. `G4:0-1,0-2,0-3,1-2` for the paw.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Vertex labels are bit positions in a `u64` adjacency mask.
pub const MAX_VERTICES: usize = 64;

/// An unlabeled-by-convention graph as supplied by the caller: any labeling,
/// validated but not canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl RawGraph {
    /// Validates and normalizes an edge set. Each edge may be given in either
    /// orientation; loops, out-of-range endpoints and repeated edges are rejected.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertex_count > MAX_VERTICES {
            return Err(Error::input(format!(
                "graph has {vertex_count} vertices; at most {MAX_VERTICES} are supported"
            )));
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::input(format!("loop at vertex {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::input(format!(
                    "edge {a}-{b} out of range for {vertex_count} vertices"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("duplicate edge {}-{}", w[0].0, w[0].1)));
        }
        Ok(RawGraph {
            vertex_count,
            edges: normalized,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Applies a vertex relabeling: vertex `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<RawGraph> {
        if perm.len() != self.vertex_count {
            return Err(Error::input("permutation length does not match vertex count"));
        }
        RawGraph::new(
            self.vertex_count,
            self.edges.iter().map(|&(a, b)| (perm[a], perm[b])),
        )
    }

    fn adjacency(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }
}

impl fmt::Display for RawGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_graph(f, self.vertex_count, self.edges.iter().copied())
    }
}

impl FromStr for RawGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix('G')
            .ok_or_else(|| Error::input(format!("graph string {s:?} must start with 'G'")))?;
        let (v, edges) = body
            .split_once(':')
            .ok_or_else(|| Error::input(format!("graph string {s:?} is missing ':'")))?;
        let vertex_count = parse_label(v, s)?;
        let mut parsed = Vec::new();
        if !edges.is_empty() {
            for edge in edges.split(',') {
                let (a, b) = edge
                    .split_once('-')
                    .ok_or_else(|| Error::input(format!("bad edge {edge:?} in {s:?}")))?;
                parsed.push((parse_label(a, s)?, parse_label(b, s)?));
            }
        }
        RawGraph::new(vertex_count, parsed)
    }
}

fn parse_label(text: &str, whole: &str) -> Result<usize> {
    if text.is_empty() || !text.bytes().all(|c| c.is_ascii_digit()) {
        return Err(Error::input(format!("bad number {text:?} in graph string {whole:?}")));
    }
    text.parse()
        .map_err(|_| Error::input(format!("bad number {text:?} in graph string {whole:?}")))
}

fn write_graph(
    out: &mut impl fmt::Write,
    vertex_count: usize,
    edges: impl Iterator<Item = (usize, usize)>,
) -> fmt::Result {
    write!(out, "G{vertex_count}:")?;
    for (i, (a, b)) in edges.enumerate() {
        if i > 0 {
            out.write_char(',')?;
        }
        write!(out, "{a}-{b}")?;
    }
    Ok(())
}

/// The canonical representative of an isomorphism class.
///
/// Equality, hashing and ordering all go through the serialized form, so the
/// ordering of classes everywhere in the crate is the lexicographic order of
/// their graph strings.
#[derive(Clone)]
pub struct CanonicalGraph {
    vertex_count: usize,
    edges: Vec<(u8, u8)>,
    key: String,
}

impl CanonicalGraph {
    /// The graph with no vertices, unit of disjoint union.
    pub fn empty() -> Self {
        CanonicalGraph::from_sorted(0, Vec::new())
    }

    /// `count` isolated vertices.
    pub fn edgeless(count: usize) -> Self {
        assert!(count <= MAX_VERTICES);
        CanonicalGraph::from_sorted(count, Vec::new())
    }

    fn from_sorted(vertex_count: usize, edges: Vec<(u8, u8)>) -> Self {
        let mut key = String::new();
        write_graph(
            &mut key,
            vertex_count,
            edges.iter().map(|&(a, b)| (a as usize, b as usize)),
        )
        .expect("writing to a String cannot fail");
        CanonicalGraph {
            vertex_count,
            edges,
            key,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(a, b)| (a as usize, b as usize))
    }

    pub fn as_str(&self) -> &str {
        &self.key
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertex_count: self.vertex_count,
            edges: self.edges().collect(),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for (a, b) in self.edges() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Parses a graph string and insists that it is already canonical.
    pub fn parse_canonical(s: &str) -> Result<Self> {
        let raw: RawGraph = s.parse()?;
        let canon = canonicalize(&raw);
        if canon.as_str() != s {
            return Err(Error::input(format!(
                "graph string {s:?} is not canonical (canonical form is {canon})"
            )));
        }
        Ok(canon)
    }

    /// Parses any labeling of a graph and returns its canonical form.
    pub fn parse_any(s: &str) -> Result<Self> {
        Ok(canonicalize(&s.parse()?))
    }
}

impl PartialEq for CanonicalGraph {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for CanonicalGraph {}

impl Hash for CanonicalGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for CanonicalGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for CanonicalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

impl fmt::Debug for CanonicalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

impl FromStr for CanonicalGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CanonicalGraph::parse_canonical(s)
    }
}

impl Serialize for CanonicalGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.key)
    }
}

impl<'de> Deserialize<'de> for CanonicalGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CanonicalGraph::parse_canonical(&s).map_err(serde::de::Error::custom)
    }
}

/// Order of an automorphism group. Always divides `v!`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AutCount(pub BigUint);

impl fmt::Display for AutCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Returns the canonical form of `g`.
pub fn canonicalize(g: &RawGraph) -> CanonicalGraph {
    let labeling = CanonicalSearch::run(g);
    let mut position = vec![0usize; g.vertex_count];
    for (label, &vertex) in labeling.order.iter().enumerate() {
        position[vertex] = label;
    }
    let mut edges: Vec<(u8, u8)> = g
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (position[a], position[b]);
            (x.min(y) as u8, x.max(y) as u8)
        })
        .collect();
    edges.sort_unstable();
    CanonicalGraph::from_sorted(g.vertex_count, edges)
}

/// Exact order of the automorphism group of `g`.
pub fn automorphism_count(g: &CanonicalGraph) -> AutCount {
    AutCount(CanonicalSearch::run(&g.to_raw()).automorphisms)
}

pub fn isolated_vertex_count(g: &CanonicalGraph) -> usize {
    g.degrees().iter().filter(|&&d| d == 0).count()
}

/// Removes the edge at position `index` of the canonical edge list. The vertex
/// set is kept, so the result may gain isolated vertices.
pub fn delete_edge(g: &CanonicalGraph, index: usize) -> Result<CanonicalGraph> {
    if index >= g.edge_count() {
        return Err(Error::input(format!(
            "edge index {index} out of range for {g} ({} edges)",
            g.edge_count()
        )));
    }
    let raw = RawGraph {
        vertex_count: g.vertex_count,
        edges: g
            .edges()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, e)| e)
            .collect(),
    };
    Ok(canonicalize(&raw))
}

/// Removes vertex `u` and every edge incident to it.
pub fn delete_vertex(g: &CanonicalGraph, u: usize) -> Result<CanonicalGraph> {
    if u >= g.vertex_count {
        return Err(Error::input(format!(
            "vertex {u} out of range for {g} ({} vertices)",
            g.vertex_count
        )));
    }
    let shift = |x: usize| if x > u { x - 1 } else { x };
    let raw = RawGraph {
        vertex_count: g.vertex_count - 1,
        edges: g
            .edges()
            .filter(|&(a, b)| a != u && b != u)
            .map(|(a, b)| (shift(a), shift(b)))
            .collect(),
    };
    Ok(canonicalize(&raw))
}

/// Disjoint union; `h`'s vertices are placed after `g`'s before re-canonicalizing.
pub fn disjoint_union(g: &CanonicalGraph, h: &CanonicalGraph) -> Result<CanonicalGraph> {
    let vertex_count = g.vertex_count + h.vertex_count;
    if vertex_count > MAX_VERTICES {
        return Err(Error::input(format!(
            "disjoint union of {g} and {h} has {vertex_count} vertices; at most {MAX_VERTICES} are supported"
        )));
    }
    let offset = g.vertex_count;
    let raw = RawGraph {
        vertex_count,
        edges: g
            .edges()
            .chain(h.edges().map(|(a, b)| (a + offset, b + offset)))
            .collect(),
    };
    Ok(canonicalize(&raw))
}

/// Result of the labeling search: the vertex order that produces the canonical
/// form, and the number of labelings that produce it (the automorphism count).
struct Labeling {
    order: Vec<usize>,
    automorphisms: BigUint,
}

/// Search for the lex-smallest sorted edge list.
///
/// For two edge lists of equal length, the lex-smaller one is exactly the one
/// whose row-major upper-triangular adjacency bit string is lex-larger. Labels
/// are assigned in order 0, 1, 2, ...; after labeling a prefix, the unlabeled
/// vertices sit in an ordered partition (cells) whose order is forced by the
/// rows already fixed. The next label must come from the first cell, and row
/// `k` of the bit string is determined by how many vertices of each cell the
/// chosen vertex is adjacent to. Only candidates with the largest such row
/// survive. Candidates that are twins (equal neighborhoods apart from each
/// other) give isomorphic subtrees, so one representative is explored and its
/// leaf count is weighted by the twin class size.
struct CanonicalSearch<'a> {
    adj: &'a [u64],
    best_rows: Vec<Vec<u32>>,
    best_order: Vec<usize>,
    best_count: BigUint,
    path_rows: Vec<Vec<u32>>,
    path_order: Vec<usize>,
}

impl<'a> CanonicalSearch<'a> {
    fn run(g: &RawGraph) -> Labeling {
        let adj = g.adjacency();
        let v = g.vertex_count;
        if v == 0 {
            return Labeling {
                order: Vec::new(),
                automorphisms: BigUint::one(),
            };
        }
        let mut search = CanonicalSearch {
            adj: &adj,
            best_rows: Vec::new(),
            best_order: Vec::new(),
            best_count: BigUint::default(),
            path_rows: Vec::with_capacity(v),
            path_order: Vec::with_capacity(v),
        };
        let all = if v == 64 { u64::MAX } else { (1u64 << v) - 1 };
        search.descend(vec![all], BigUint::one());
        Labeling {
            order: search.best_order,
            automorphisms: search.best_count,
        }
    }

    fn row_for(&self, u: usize, cells: &[u64]) -> Vec<u32> {
        let nbrs = self.adj[u];
        cells
            .iter()
            .enumerate()
            .map(|(i, &cell)| {
                let cell = if i == 0 { cell & !(1u64 << u) } else { cell };
                (nbrs & cell).count_ones()
            })
            .collect()
    }

    fn descend(&mut self, cells: Vec<u64>, weight: BigUint) {
        let depth = self.path_order.len();
        if cells.is_empty() {
            self.finish_leaf(weight);
            return;
        }

        // Candidates from the first cell, keeping only the lex-largest rows.
        let first = cells[0];
        let mut best_row: Option<Vec<u32>> = None;
        let mut candidates: Vec<usize> = Vec::new();
        for u in bits(first) {
            let row = self.row_for(u, &cells);
            match best_row.as_ref().map(|b| row.cmp(b)) {
                None | Some(Ordering::Greater) => {
                    best_row = Some(row);
                    candidates.clear();
                    candidates.push(u);
                }
                Some(Ordering::Equal) => candidates.push(u),
                Some(Ordering::Less) => {}
            }
        }
        let row = best_row.expect("first cell is never empty");

        self.path_rows.push(row);
        if self.compare_with_best(depth) == Ordering::Less {
            self.path_rows.pop();
            return;
        }

        for (rep, class_size) in twin_classes(self.adj, &candidates) {
            let nbrs = self.adj[rep];
            let mut next = Vec::with_capacity(cells.len() + 1);
            for (i, &cell) in cells.iter().enumerate() {
                let cell = if i == 0 { cell & !(1u64 << rep) } else { cell };
                let inside = cell & nbrs;
                let outside = cell & !nbrs;
                if inside != 0 {
                    next.push(inside);
                }
                if outside != 0 {
                    next.push(outside);
                }
            }
            self.path_order.push(rep);
            self.descend(next, &weight * BigUint::from(class_size));
            self.path_order.pop();
        }
        self.path_rows.pop();
    }

    /// Compares the current path prefix (rows up to and including `depth`)
    /// with the best leaf found so far.
    fn compare_with_best(&self, depth: usize) -> Ordering {
        if self.best_rows.is_empty() {
            return Ordering::Greater;
        }
        self.path_rows[..=depth].cmp(&self.best_rows[..=depth])
    }

    fn finish_leaf(&mut self, weight: BigUint) {
        match self.compare_with_best(self.path_rows.len() - 1) {
            Ordering::Greater => {
                self.best_rows = self.path_rows.clone();
                self.best_order = self.path_order.clone();
                self.best_count = weight;
            }
            Ordering::Equal => self.best_count += weight,
            Ordering::Less => unreachable!("dominated branches are pruned before reaching a leaf"),
        }
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Groups candidates into twin classes: `u ~ w` when their neighborhoods agree
/// after removing each other. Returns one representative per class with the
/// class size.
fn twin_classes(adj: &[u64], candidates: &[usize]) -> Vec<(usize, usize)> {
    let mut classes: Vec<(usize, usize)> = Vec::new();
    for &u in candidates {
        let found = classes.iter_mut().find(|(rep, _)| {
            let w = *rep;
            adj[u] & !(1u64 << w) == adj[w] & !(1u64 << u)
        });
        match found {
            Some(entry) => entry.1 += 1,
            None => classes.push((u, 1)),
        }
    }
    classes
}
