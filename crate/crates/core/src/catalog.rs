//! Isomorphism-class catalogs per stratum `(v, n)`: all graphs with exactly
//! `v` vertices and `n` edges, one canonical representative each.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::graph::{canonicalize, CanonicalGraph, RawGraph, MAX_VERTICES};

/// The classes of one stratum in serialization order, with a reverse index.
#[derive(Clone, Debug)]
pub struct StratumCatalog {
    v: usize,
    n: usize,
    classes: Vec<CanonicalGraph>,
    index: HashMap<CanonicalGraph, usize>,
}

impl PartialEq for StratumCatalog {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.n == other.n && self.classes == other.classes
    }
}

impl Eq for StratumCatalog {}

impl StratumCatalog {
    /// Builds a catalog from canonical classes, sorting them. Rejects classes of
    /// the wrong shape and repeated classes.
    pub fn from_classes(v: usize, n: usize, mut classes: Vec<CanonicalGraph>) -> Result<Self> {
        if let Some(bad) = classes
            .iter()
            .find(|g| g.vertex_count() != v || g.edge_count() != n)
        {
            return Err(Error::input(format!(
                "class {bad} does not belong to stratum (v={v}, n={n})"
            )));
        }
        classes.sort();
        if let Some(w) = classes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("class {} listed twice", w[0])));
        }
        let index = classes
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        Ok(StratumCatalog {
            v,
            n,
            classes,
            index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[CanonicalGraph] {
        &self.classes
    }

    pub fn get(&self, i: usize) -> Option<&CanonicalGraph> {
        self.classes.get(i)
    }

    pub fn position(&self, g: &CanonicalGraph) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CanonicalGraph> {
        self.classes.iter()
    }
}

impl<'a> IntoIterator for &'a StratumCatalog {
    type Item = &'a CanonicalGraph;
    type IntoIter = std::slice::Iter<'a, CanonicalGraph>;

    fn into_iter(self) -> Self::IntoIter {
        self.classes.iter()
    }
}

pub fn max_edges(v: usize) -> usize {
    v * v.saturating_sub(1) / 2
}

/// Enumerates every isomorphism class with `v` vertices and `n` edges.
///
/// Classes are grown one edge at a time from the edgeless graph and
/// deduplicated by canonical form. Strata above half density are obtained by
/// complementing the mirror stratum.
pub fn enumerate_stratum(v: usize, n: usize, limits: &Limits) -> Result<StratumCatalog> {
    check_range(v, n)?;
    let full = max_edges(v);
    if n > full / 2 {
        let mirror = enumerate_layers(v, full - n, limits)?.pop().expect("at least one layer");
        let classes = mirror.classes.iter().map(complement).collect();
        return StratumCatalog::from_classes(v, n, classes);
    }
    Ok(enumerate_layers(v, n, limits)?
        .pop()
        .expect("at least one layer"))
}

/// Enumerates the strata `(v, 0), (v, 1), ..., (v, n_max)` in one pass.
pub fn enumerate_layers(v: usize, n_max: usize, limits: &Limits) -> Result<Vec<StratumCatalog>> {
    check_range(v, n_max)?;
    let states = AtomicU64::new(0);
    let mut layers = vec![StratumCatalog::from_classes(
        v,
        0,
        vec![CanonicalGraph::edgeless(v)],
    )?];
    for n in 1..=n_max {
        let prev = layers.last().expect("layer zero exists");
        let non_edges = (max_edges(v) - (n - 1)) as u64;
        let needed = states.load(Ordering::Relaxed) + prev.len() as u64 * non_edges;
        if needed > limits.max_states {
            return Err(Error::resource(
                format!("enumerating stratum (v={v}, n={n}) needs {needed} canonicalizations"),
                limits.max_states,
            ));
        }
        states.store(needed, Ordering::Relaxed);
        let mut grown: Vec<CanonicalGraph> = prev
            .classes
            .par_iter()
            .flat_map_iter(add_one_edge)
            .collect();
        grown.par_sort_unstable();
        grown.dedup();
        layers.push(StratumCatalog::from_classes(v, n, grown)?);
    }
    Ok(layers)
}

fn check_range(v: usize, n: usize) -> Result<()> {
    if v > MAX_VERTICES {
        return Err(Error::input(format!(
            "stratum (v={v}, n={n}): at most {MAX_VERTICES} vertices are supported"
        )));
    }
    if n > max_edges(v) {
        return Err(Error::input(format!(
            "stratum (v={v}, n={n}): a simple graph on {v} vertices has at most {} edges",
            max_edges(v)
        )));
    }
    Ok(())
}

fn add_one_edge(g: &CanonicalGraph) -> Vec<CanonicalGraph> {
    let v = g.vertex_count();
    let mut present = vec![false; v * v];
    for (a, b) in g.edges() {
        present[a * v + b] = true;
    }
    let mut out = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            if !present[a * v + b] {
                let raw = RawGraph::new(v, g.edges().chain(std::iter::once((a, b))))
                    .expect("adding a missing edge keeps the graph simple");
                out.push(canonicalize(&raw));
            }
        }
    }
    out
}

/// Complement on the same vertex set.
pub fn complement(g: &CanonicalGraph) -> CanonicalGraph {
    let v = g.vertex_count();
    let present: std::collections::HashSet<(usize, usize)> = g.edges().collect();
    let edges = (0..v)
        .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
        .filter(|e| !present.contains(e));
    canonicalize(&RawGraph::new(v, edges).expect("complement edges are valid"))
}

pub const CATALOG_FORMAT_VERSION: u32 = 1;

/// On-disk catalog representation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogFile {
    pub format_version: u32,
    pub v: usize,
    pub n: usize,
    pub classes: Vec<String>,
    pub generated_by: String,
}

impl From<&StratumCatalog> for CatalogFile {
    fn from(catalog: &StratumCatalog) -> Self {
        CatalogFile {
            format_version: CATALOG_FORMAT_VERSION,
            v: catalog.v,
            n: catalog.n,
            classes: catalog.classes.iter().map(|g| g.to_string()).collect(),
            generated_by: concat!("deckforge ", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }
}

impl TryFrom<CatalogFile> for StratumCatalog {
    type Error = Error;

    fn try_from(file: CatalogFile) -> Result<Self> {
        if file.format_version != CATALOG_FORMAT_VERSION {
            return Err(Error::input(format!(
                "catalog format version {} is not supported (expected {CATALOG_FORMAT_VERSION})",
                file.format_version
            )));
        }
        let classes = file
            .classes
            .iter()
            .map(|s| CanonicalGraph::parse_canonical(s))
            .collect::<Result<Vec<_>>>()?;
        StratumCatalog::from_classes(file.v, file.n, classes)
    }
}
