//! Reconstruction problems on finite catalogs.
//!
//! A problem is a map from iso classes to comparable data; it is
//! reconstructable when the map is injective. Reconstruction degrees are
//! partitions of the class list, ordered by refinement, with the identity
//! problem at the bottom and the constant problem at the top. Atomic settings
//! split objects into a distinguished object, fixed atoms and molecules that
//! decompose into atoms; a size map stratifies such a decomposition.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abelian::K0Presentation;
use crate::cache::CatalogStore;
use crate::catalog::max_edges;
use crate::deck::{edge_deck, vertex_deck, Deck, DeckKind};
use crate::error::{Error, Result};
use crate::graph::CanonicalGraph;

/// Class labels with opaque data; equal bytes mean isomorphic data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSetting {
    classes: Vec<String>,
    data: Vec<Vec<u8>>,
}

impl FiniteSetting {
    pub fn new(classes: Vec<String>, mut data: HashMap<String, Vec<u8>>) -> Result<Self> {
        check_distinct(&classes)?;
        let values = classes
            .iter()
            .map(|c| {
                data.remove(c)
                    .ok_or_else(|| Error::input(format!("no data for class {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = data.keys().min() {
            return Err(Error::input(format!("data given for unknown class {extra:?}")));
        }
        Ok(FiniteSetting {
            classes,
            data: values,
        })
    }

    pub fn from_fn(classes: Vec<String>, mut f: impl FnMut(&str) -> Vec<u8>) -> Result<Self> {
        check_distinct(&classes)?;
        let data = classes.iter().map(|c| f(c)).collect();
        Ok(FiniteSetting { classes, data })
    }

    /// Each class is its own data.
    pub fn identity(classes: Vec<String>) -> Result<Self> {
        FiniteSetting::from_fn(classes, |c| c.as_bytes().to_vec())
    }

    /// All classes share one datum.
    pub fn terminal(classes: Vec<String>) -> Result<Self> {
        FiniteSetting::from_fn(classes, |_| Vec::new())
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn data(&self, class: &str) -> Option<&[u8]> {
        self.classes
            .iter()
            .position(|c| c == class)
            .map(|i| self.data[i].as_slice())
    }

    pub fn to_file(&self) -> SettingFile {
        SettingFile {
            classes: self.classes.clone(),
            data: self
                .classes
                .iter()
                .zip(&self.data)
                .map(|(c, d)| {
                    let text = match std::str::from_utf8(d) {
                        Ok(s) if !s.starts_with("b64:") => s.to_string(),
                        _ => format!("b64:{}", BASE64.encode(d)),
                    };
                    (c.clone(), text)
                })
                .collect(),
        }
    }

    pub fn from_file(file: SettingFile) -> Result<Self> {
        let data = file
            .data
            .into_iter()
            .map(|(c, text)| {
                let bytes = match text.strip_prefix("b64:") {
                    Some(b64) => BASE64
                        .decode(b64)
                        .map_err(|e| Error::input(format!("class {c:?}: bad base64 data: {e}")))?,
                    None => text.into_bytes(),
                };
                Ok((c, bytes))
            })
            .collect::<Result<HashMap<_, _>>>()?;
        FiniteSetting::new(file.classes, data)
    }
}

fn check_distinct(classes: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for c in classes {
        if !seen.insert(c.as_str()) {
            return Err(Error::input(format!("class {c:?} listed twice")));
        }
    }
    Ok(())
}

/// `{classes: [labels], data: {label: text or "b64:<base64>"}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingFile {
    pub classes: Vec<String>,
    pub data: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reconstructability {
    Injective,
    /// Two classes with equal data, the first collision in class order.
    Collision(String, String),
}

impl Reconstructability {
    pub fn holds(&self) -> bool {
        matches!(self, Reconstructability::Injective)
    }
}

pub fn is_reconstructable(s: &FiniteSetting) -> Reconstructability {
    let mut first: HashMap<&[u8], usize> = HashMap::new();
    for (i, d) in s.data.iter().enumerate() {
        if let Some(&j) = first.get(d.as_slice()) {
            return Reconstructability::Collision(s.classes[j].clone(), s.classes[i].clone());
        }
        first.insert(d, i);
    }
    Reconstructability::Injective
}

/// Whether `p` is `d`-recognizable: classes with equal `d`-data have equal
/// `p`-data.
pub fn is_recognizable(p: &FiniteSetting, d: &FiniteSetting) -> Result<bool> {
    DegreePartition::from_setting(d).refines(&DegreePartition::from_setting(p))
}

/// A partition of a class list. Block numbers follow first appearance, so
/// equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreePartition {
    classes: Vec<String>,
    block_of: Vec<usize>,
}

impl DegreePartition {
    fn normalized(classes: Vec<String>, keys: &[usize]) -> Self {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let block_of = keys
            .iter()
            .map(|k| {
                let next = renumber.len();
                *renumber.entry(*k).or_insert(next)
            })
            .collect();
        DegreePartition { classes, block_of }
    }

    pub fn from_setting(s: &FiniteSetting) -> Self {
        let mut ids: HashMap<&[u8], usize> = HashMap::new();
        let keys: Vec<usize> = s
            .data
            .iter()
            .map(|d| {
                let next = ids.len();
                *ids.entry(d.as_slice()).or_insert(next)
            })
            .collect();
        DegreePartition::normalized(s.classes.clone(), &keys)
    }

    pub fn from_blocks(classes: Vec<String>, blocks: &[Vec<String>]) -> Result<Self> {
        check_distinct(&classes)?;
        let mut keys = vec![usize::MAX; classes.len()];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::input("partition has an empty block"));
            }
            for c in block {
                let i = classes
                    .iter()
                    .position(|x| x == c)
                    .ok_or_else(|| Error::input(format!("block mentions unknown class {c:?}")))?;
                if keys[i] != usize::MAX {
                    return Err(Error::input(format!("class {c:?} lies in two blocks")));
                }
                keys[i] = b;
            }
        }
        if let Some(i) = keys.iter().position(|&k| k == usize::MAX) {
            return Err(Error::input(format!("class {:?} lies in no block", classes[i])));
        }
        Ok(DegreePartition::normalized(classes, &keys))
    }

    /// The identity problem: every class alone.
    pub fn bottom(classes: Vec<String>) -> Self {
        let keys: Vec<usize> = (0..classes.len()).collect();
        DegreePartition::normalized(classes, &keys)
    }

    /// The constant problem: one block.
    pub fn top(classes: Vec<String>) -> Self {
        let keys = vec![0; classes.len()];
        DegreePartition::normalized(classes, &keys)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<String>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (c, &b) in self.classes.iter().zip(&self.block_of) {
            blocks[b].push(c.clone());
        }
        blocks
    }

    fn same_classes(&self, other: &DegreePartition) -> Result<()> {
        if self.classes != other.classes {
            return Err(Error::input("partitions are over different class lists"));
        }
        Ok(())
    }

    /// Common refinement: classes together iff together in both.
    pub fn meet(&self, other: &DegreePartition) -> Result<DegreePartition> {
        self.same_classes(other)?;
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let keys: Vec<usize> = self
            .block_of
            .iter()
            .zip(&other.block_of)
            .map(|(&a, &b)| {
                let next = ids.len();
                *ids.entry((a, b)).or_insert(next)
            })
            .collect();
        Ok(DegreePartition::normalized(self.classes.clone(), &keys))
    }

    /// Finest common coarsening: the transitive closure of both relations.
    pub fn join(&self, other: &DegreePartition) -> Result<DegreePartition> {
        self.same_classes(other)?;
        let n = self.classes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for blocks in [&self.block_of, &other.block_of] {
            let mut first: HashMap<usize, usize> = HashMap::new();
            for (i, &b) in blocks.iter().enumerate() {
                let root = *first.entry(b).or_insert(i);
                let (a, c) = (find(&mut parent, root), find(&mut parent, i));
                parent[a.max(c)] = a.min(c);
            }
        }
        let keys: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Ok(DegreePartition::normalized(self.classes.clone(), &keys))
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &DegreePartition) -> Result<bool> {
        self.same_classes(other)?;
        let mut image: HashMap<usize, usize> = HashMap::new();
        Ok(self
            .block_of
            .iter()
            .zip(&other.block_of)
            .all(|(&a, &b)| *image.entry(a).or_insert(b) == b))
    }
}

/// Objects split into a distinguished object, atoms and molecules, with a
/// decomposition of every molecule into atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomicSetting {
    pub distinguished: String,
    pub atoms: BTreeSet<String>,
    pub molecules: BTreeSet<String>,
    pub patching: BTreeMap<String, Vec<(String, usize)>>,
}

/// The first condition an atomic setting fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomicViolation {
    /// (1) there is at least one atom.
    NoAtoms,
    /// Labels must split as distinguished, atoms, molecules.
    LabelsOverlap(String),
    /// The distinguished object is fixed.
    DistinguishedDecomposed,
    /// Every decomposition has at least two pieces.
    TooFewPieces(String),
    /// No molecule is one of its own pieces.
    SelfPiece(String),
    /// (3) atoms are fixed.
    AtomDecomposed(String),
    /// (4) every molecule decomposes, and only into atoms.
    NotIntoAtoms(String),
}

impl std::fmt::Display for AtomicViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AtomicViolation::NoAtoms => write!(f, "condition (1): the atom set is empty"),
            AtomicViolation::LabelsOverlap(c) => {
                write!(f, "condition (2): {c} is listed in more than one role")
            }
            AtomicViolation::DistinguishedDecomposed => {
                write!(f, "patching condition (i): the distinguished object is decomposed")
            }
            AtomicViolation::TooFewPieces(c) => {
                write!(f, "patching condition (ii): {c} decomposes into fewer than two pieces")
            }
            AtomicViolation::SelfPiece(c) => {
                write!(f, "patching condition (ii): {c} is one of its own pieces")
            }
            AtomicViolation::AtomDecomposed(c) => write!(f, "condition (3): atom {c} is decomposed"),
            AtomicViolation::NotIntoAtoms(c) => {
                write!(f, "condition (4): {c} does not decompose into atoms")
            }
        }
    }
}

impl AtomicSetting {
    /// Every label in the setting, distinguished object first.
    pub fn labels(&self) -> Vec<String> {
        std::iter::once(self.distinguished.clone())
            .chain(self.atoms.iter().cloned())
            .chain(self.molecules.iter().cloned())
            .collect()
    }

    /// The decomposition data: molecules map to their multiset of pieces,
    /// everything else to itself.
    pub fn to_finite_setting(&self) -> Result<FiniteSetting> {
        let mut labels = self.labels();
        labels.sort();
        labels.dedup();
        FiniteSetting::from_fn(labels, |c| match self.patching.get(c) {
            Some(pieces) if self.molecules.contains(c) => pieces_datum(pieces),
            _ => fixed_datum(c),
        })
    }
}

fn fixed_datum(label: &str) -> Vec<u8> {
    serde_json::to_vec(&("fixed", label)).expect("string serialization")
}

fn pieces_datum(pieces: &[(String, usize)]) -> Vec<u8> {
    let mut merged: BTreeMap<&str, usize> = BTreeMap::new();
    for (p, m) in pieces {
        *merged.entry(p.as_str()).or_default() += m;
    }
    merged.retain(|_, m| *m > 0);
    serde_json::to_vec(&("pieces", merged)).expect("map serialization")
}

pub fn validate_atomic(s: &AtomicSetting) -> Option<AtomicViolation> {
    if s.atoms.is_empty() {
        return Some(AtomicViolation::NoAtoms);
    }
    if s.atoms.contains(&s.distinguished) || s.molecules.contains(&s.distinguished) {
        return Some(AtomicViolation::LabelsOverlap(s.distinguished.clone()));
    }
    if let Some(c) = s.atoms.intersection(&s.molecules).next() {
        return Some(AtomicViolation::LabelsOverlap(c.clone()));
    }
    if s.patching.contains_key(&s.distinguished) {
        return Some(AtomicViolation::DistinguishedDecomposed);
    }
    for (m, pieces) in &s.patching {
        if pieces.iter().map(|(_, k)| k).sum::<usize>() < 2 {
            return Some(AtomicViolation::TooFewPieces(m.clone()));
        }
        if pieces.iter().any(|(p, k)| p == m && *k > 0) {
            return Some(AtomicViolation::SelfPiece(m.clone()));
        }
    }
    if let Some(a) = s.patching.keys().find(|c| s.atoms.contains(*c)) {
        return Some(AtomicViolation::AtomDecomposed(a.clone()));
    }
    if let Some(c) = s.patching.keys().find(|c| !s.molecules.contains(*c)) {
        return Some(AtomicViolation::LabelsOverlap(c.clone()));
    }
    for m in &s.molecules {
        let ok = s.patching.get(m).is_some_and(|pieces| {
            pieces
                .iter()
                .all(|(p, k)| *k == 0 || s.atoms.contains(p))
        });
        if !ok {
            return Some(AtomicViolation::NotIntoAtoms(m.clone()));
        }
    }
    None
}

/// Generators are the molecules then the atoms, each sorted; the
/// distinguished object is omitted. One relation `[M] - sum [A_i]` per
/// molecule.
pub fn atomic_to_relations(s: &AtomicSetting) -> Result<K0Presentation> {
    if let Some(v) = validate_atomic(s) {
        return Err(Error::input(format!("invalid atomic setting: {v}")));
    }
    let generators: Vec<String> = s.molecules.iter().chain(&s.atoms).cloned().collect();
    let index: HashMap<&str, usize> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_str(), i))
        .collect();
    let relations = s
        .molecules
        .iter()
        .map(|m| {
            std::iter::once((index[m.as_str()], BigInt::from(1)))
                .chain(s.patching[m].iter().map(|(a, k)| (index[a.as_str()], -BigInt::from(*k))))
                .collect()
        })
        .collect();
    K0Presentation::new(generators, relations)
}

fn deck_pieces(deck: &Deck) -> Vec<(String, usize)> {
    deck.cards().iter().map(|(c, m)| (c.to_string(), *m)).collect()
}

/// Molecules are the `n`-edge classes on `v` vertices, atoms the
/// `(n-1)`-edge classes, pieces the edge-deck cards. The distinguished object
/// is the empty graph.
pub fn edge_deck_setting(v: usize, n: usize, store: &CatalogStore) -> Result<AtomicSetting> {
    if n == 0 {
        return Err(Error::input(format!("stratum (v={v}, n=0) has no edge decks")));
    }
    let top = store.stratum(v, n)?;
    let below = store.stratum(v, n - 1)?;
    let patching = top
        .iter()
        .map(|g| Ok((g.to_string(), deck_pieces(&edge_deck(g)?))))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(AtomicSetting {
        distinguished: CanonicalGraph::empty().to_string(),
        atoms: below.iter().map(|g| g.to_string()).collect(),
        molecules: top.iter().map(|g| g.to_string()).collect(),
        patching,
    })
}

/// Molecules are all classes on `v` vertices, atoms all classes on `v - 1`,
/// pieces the vertex-deck cards.
pub fn vertex_deck_setting(v: usize, store: &CatalogStore) -> Result<AtomicSetting> {
    if v < 2 {
        return Err(Error::input(format!("vertex decks on {v} vertices have fewer than two cards")));
    }
    let mut molecules = BTreeSet::new();
    let mut patching = BTreeMap::new();
    for n in 0..=max_edges(v) {
        for g in store.stratum(v, n)?.iter() {
            molecules.insert(g.to_string());
            patching.insert(g.to_string(), deck_pieces(&vertex_deck(g)?));
        }
    }
    let mut atoms = BTreeSet::new();
    for n in 0..=max_edges(v - 1) {
        atoms.extend(store.stratum(v - 1, n)?.iter().map(|g| g.to_string()));
    }
    Ok(AtomicSetting {
        distinguished: CanonicalGraph::empty().to_string(),
        atoms,
        molecules,
        patching,
    })
}

/// The data map of a deck on one stratum, as a finite setting.
pub fn deck_finite_setting(kind: DeckKind, v: usize, n: usize, store: &CatalogStore) -> Result<FiniteSetting> {
    let catalog = store.stratum(v, n)?;
    let mut data = HashMap::new();
    for g in catalog.iter() {
        let deck = crate::deck::deck_of(kind, g)?;
        data.insert(g.to_string(), pieces_datum(&deck_pieces(&deck)));
    }
    FiniteSetting::new(catalog.iter().map(|g| g.to_string()).collect(), data)
}

/// A graph invariant on one stratum, as a finite setting.
pub fn property_setting(
    v: usize,
    n: usize,
    store: &CatalogStore,
    f: impl Fn(&CanonicalGraph) -> String,
) -> Result<FiniteSetting> {
    let catalog = store.stratum(v, n)?;
    let data = catalog
        .iter()
        .map(|g| (g.to_string(), f(g).into_bytes()))
        .collect();
    FiniteSetting::new(catalog.iter().map(|g| g.to_string()).collect(), data)
}

/// A catalog in which some objects decompose into pieces and the rest are
/// fixed. The induced problem sends a fixed object to itself and a
/// decomposed object to its multiset of pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub distinguished: String,
    pub classes: Vec<String>,
    pub pieces: BTreeMap<String, Vec<(String, usize)>>,
}

impl Decomposition {
    pub fn new(
        distinguished: String,
        classes: Vec<String>,
        pieces: BTreeMap<String, Vec<(String, usize)>>,
    ) -> Result<Self> {
        check_distinct(&classes)?;
        let known: BTreeSet<&str> = classes.iter().map(String::as_str).collect();
        if !known.contains(distinguished.as_str()) {
            return Err(Error::input(format!("distinguished object {distinguished:?} is not a class")));
        }
        for (c, ps) in &pieces {
            if !known.contains(c.as_str()) {
                return Err(Error::input(format!("decomposed object {c:?} is not a class")));
            }
            if let Some((p, _)) = ps.iter().find(|(p, _)| !known.contains(p.as_str())) {
                return Err(Error::input(format!("piece {p:?} of {c:?} is not a class")));
            }
        }
        Ok(Decomposition {
            distinguished,
            classes,
            pieces,
        })
    }

    /// Nothing is decomposed.
    pub fn identity(distinguished: String, classes: Vec<String>) -> Result<Self> {
        Decomposition::new(distinguished, classes, BTreeMap::new())
    }

    pub fn is_fixed(&self, c: &str) -> bool {
        !self.pieces.contains_key(c)
    }

    pub fn to_finite_setting(&self) -> FiniteSetting {
        FiniteSetting::from_fn(self.classes.clone(), |c| match self.pieces.get(c) {
            Some(ps) => pieces_datum(ps),
            None => fixed_datum(c),
        })
        .expect("classes validated on construction")
    }
}

/// All classes on `v` vertices with at most `n_max` edges. Classes whose edge
/// count is in `decomposed` and at least 2 decompose into their edge decks;
/// the rest are fixed. The edgeless graph is the distinguished object.
pub fn edge_deck_decomposition(
    v: usize,
    n_max: usize,
    decomposed: &BTreeSet<usize>,
    store: &CatalogStore,
) -> Result<Decomposition> {
    let mut classes = Vec::new();
    let mut pieces = BTreeMap::new();
    for n in 0..=n_max.min(max_edges(v)) {
        for g in store.stratum(v, n)?.iter() {
            classes.push(g.to_string());
            if n >= 2 && decomposed.contains(&n) {
                pieces.insert(g.to_string(), deck_pieces(&edge_deck(g)?));
            }
        }
    }
    Decomposition::new(CanonicalGraph::edgeless(v).to_string(), classes, pieces)
}

/// Non-negative sizes for every class of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeMap {
    pub sizes: BTreeMap<String, u64>,
}

impl SizeMap {
    pub fn edge_count(d: &Decomposition) -> Result<Self> {
        let sizes = d
            .classes
            .iter()
            .map(|c| Ok((c.clone(), CanonicalGraph::parse_canonical(c)?.edge_count() as u64)))
            .collect::<Result<_>>()?;
        Ok(SizeMap { sizes })
    }

    fn of(&self, c: &str) -> Result<u64> {
        self.sizes
            .get(c)
            .copied()
            .ok_or_else(|| Error::input(format!("size map has no value for {c:?}")))
    }

    /// Checks the size-map axioms against `d`, naming the offending object.
    pub fn validate(&self, d: &Decomposition) -> Result<()> {
        let empty = self.of(&d.distinguished)?;
        for c in &d.classes {
            let size = self.of(c)?;
            if *c != d.distinguished && size <= empty {
                return Err(Error::input(format!(
                    "size map: {c:?} has size {size}, not above the distinguished object's {empty}"
                )));
            }
            if let Some(ps) = d.pieces.get(c) {
                for (p, _) in ps {
                    let ps = self.of(p)?;
                    if ps >= size {
                        return Err(Error::input(format!(
                            "size map: piece {p:?} of {c:?} has size {ps}, not below {size}"
                        )));
                    }
                }
            }
        }
        let image: BTreeSet<u64> = d.classes.iter().map(|c| self.of(c)).collect::<Result<_>>()?;
        if image.len() < 3 {
            return Err(Error::input(format!(
                "size map takes only {} distinct values; at least 3 are required",
                image.len()
            )));
        }
        Ok(())
    }

    pub fn to_finite_setting(&self, d: &Decomposition) -> Result<FiniteSetting> {
        let data = d
            .classes
            .iter()
            .map(|c| Ok((c.clone(), self.of(c)?.to_string().into_bytes())))
            .collect::<Result<HashMap<_, _>>>()?;
        FiniteSetting::new(d.classes.clone(), data)
    }
}

/// For each size value `s`, the atomic setting that decomposes exactly the
/// unfixed objects of size `s`: molecules are those objects, atoms are all
/// other objects except the distinguished one.
pub fn stratify_by_size(d: &Decomposition, sz: &SizeMap) -> Result<Vec<(u64, AtomicSetting)>> {
    sz.validate(d)?;
    let values: BTreeSet<u64> = d.classes.iter().map(|c| sz.of(c)).collect::<Result<_>>()?;
    values
        .into_iter()
        .map(|s| {
            let mut atoms = BTreeSet::new();
            let mut molecules = BTreeSet::new();
            let mut patching = BTreeMap::new();
            for c in &d.classes {
                if *c == d.distinguished {
                    continue;
                }
                match d.pieces.get(c) {
                    Some(ps) if sz.of(c)? == s => {
                        molecules.insert(c.clone());
                        patching.insert(c.clone(), ps.clone());
                    }
                    _ => {
                        atoms.insert(c.clone());
                    }
                }
            }
            Ok((
                s,
                AtomicSetting {
                    distinguished: d.distinguished.clone(),
                    atoms,
                    molecules,
                    patching,
                },
            ))
        })
        .collect()
}

/// Checks that `d` is reconstructable exactly when every size stratum is,
/// and returns that common value. Fails with an input error if the size map
/// is invalid or not `d`-recognizable, and with an invariant error if the two
/// sides disagree.
pub fn check_size_reconstruction_theorem(d: &Decomposition, sz: &SizeMap) -> Result<bool> {
    sz.validate(d)?;
    let data = d.to_finite_setting();
    if !is_recognizable(&sz.to_finite_setting(d)?, &data)? {
        return Err(Error::input(
            "precondition failed: the size map is not recognizable from the decomposition",
        ));
    }
    let whole = is_reconstructable(&data).holds();
    let mut strata = true;
    for (s, setting) in stratify_by_size(d, sz)? {
        if let Some(v) = validate_atomic(&setting) {
            return Err(Error::invariant(format!("size stratum {s} is not an atomic setting: {v}")));
        }
        strata &= is_reconstructable(&setting.to_finite_setting()?).holds();
    }
    if whole != strata {
        return Err(Error::invariant(format!(
            "size stratification disagrees: whole problem {whole}, strata {strata}"
        )));
    }
    Ok(whole)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{build_deck_presentation, present_k0};
    use crate::config::Limits;
    use crate::graph::isolated_vertex_count;

    fn store() -> CatalogStore {
        CatalogStore::uncached(Limits::default())
    }

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn partition(blocks: &[&[&str]]) -> DegreePartition {
        let classes = labels(&["1", "2", "3"]);
        let blocks: Vec<Vec<String>> = blocks.iter().map(|b| labels(b)).collect();
        DegreePartition::from_blocks(classes, &blocks).unwrap()
    }

    #[test]
    fn reconstructability_examples() {
        let s = deck_finite_setting(DeckKind::Edge, 4, 3, &store()).unwrap();
        assert_eq!(
            is_reconstructable(&s),
            Reconstructability::Collision("G4:0-1,0-2,0-3".into(), "G4:0-1,0-2,1-2".into())
        );
        let s = deck_finite_setting(DeckKind::Edge, 5, 4, &store()).unwrap();
        assert!(is_reconstructable(&s).holds());
        assert!(is_reconstructable(&FiniteSetting::identity(labels(&["a", "b"])).unwrap()).holds());
    }

    #[test]
    fn recognizability_examples() {
        let d = deck_finite_setting(DeckKind::Edge, 5, 4, &store()).unwrap();
        let p = property_setting(5, 4, &store(), |g| isolated_vertex_count(g).to_string()).unwrap();
        assert!(is_recognizable(&p, &d).unwrap());
        assert!(is_recognizable(&d, &d).unwrap());

        let classes = labels(&["a", "b"]);
        let id = FiniteSetting::identity(classes.clone()).unwrap();
        let term = FiniteSetting::terminal(classes).unwrap();
        assert!(!is_recognizable(&id, &term).unwrap());
        let other = FiniteSetting::identity(labels(&["a", "c"])).unwrap();
        assert!(is_recognizable(&id, &other).is_err());
    }

    #[test]
    fn lattice_examples() {
        let a = partition(&[&["1", "2"], &["3"]]);
        let b = partition(&[&["1"], &["2", "3"]]);
        let classes = labels(&["1", "2", "3"]);
        assert_eq!(a.join(&b).unwrap(), DegreePartition::top(classes.clone()));
        assert_eq!(a.meet(&b).unwrap(), DegreePartition::bottom(classes.clone()));
        assert_eq!(a.meet(&DegreePartition::bottom(classes.clone())).unwrap(), DegreePartition::bottom(classes.clone()));
        assert_eq!(a.join(&DegreePartition::top(classes.clone())).unwrap(), DegreePartition::top(classes));
        assert_eq!(a.blocks(), vec![labels(&["1", "2"]), labels(&["3"])]);
    }

    #[test]
    fn partition_validation() {
        let classes = labels(&["1", "2"]);
        assert!(DegreePartition::from_blocks(classes.clone(), &[labels(&["1"])]).is_err());
        assert!(DegreePartition::from_blocks(classes.clone(), &[labels(&["1", "2"]), labels(&["2"])]).is_err());
        assert!(DegreePartition::from_blocks(classes.clone(), &[labels(&["1", "2", "9"])]).is_err());
        assert!(DegreePartition::from_blocks(classes, &[vec![], labels(&["1", "2"])]).is_err());
    }

    #[test]
    fn atomic_validation() {
        let s = edge_deck_setting(4, 2, &store()).unwrap();
        assert_eq!(validate_atomic(&s), None);

        let mut no_atoms = s.clone();
        no_atoms.atoms.clear();
        assert_eq!(validate_atomic(&no_atoms), Some(AtomicViolation::NoAtoms));

        let mut selfish = s.clone();
        let m = selfish.molecules.iter().next().unwrap().clone();
        selfish.patching.insert(m.clone(), vec![(m.clone(), 1), ("G4:0-1".into(), 1)]);
        assert_eq!(validate_atomic(&selfish), Some(AtomicViolation::SelfPiece(m)));

        let one_piece = edge_deck_setting(3, 1, &store()).unwrap();
        assert!(matches!(validate_atomic(&one_piece), Some(AtomicViolation::TooFewPieces(_))));
    }

    #[test]
    fn atomic_relations_match_deck_presentation() {
        for (v, n) in [(4, 2), (4, 3), (5, 3)] {
            let s = edge_deck_setting(v, n, &store()).unwrap();
            assert_eq!(atomic_to_relations(&s).unwrap(), build_deck_presentation(v, n, &store()).unwrap());
        }
        let vd = vertex_deck_setting(4, &store()).unwrap();
        let p = atomic_to_relations(&vd).unwrap();
        assert_eq!(p.relations().len(), 11);
        let free = AtomicSetting {
            distinguished: "E".into(),
            atoms: labels(&["a", "b"]).into_iter().collect(),
            molecules: BTreeSet::new(),
            patching: BTreeMap::new(),
        };
        let k0 = present_k0(&atomic_to_relations(&free).unwrap(), &Limits::default()).unwrap();
        assert_eq!((k0.free_rank(), k0.torsion().len()), (2, 0));
    }

    #[test]
    fn stratification_examples() {
        let all: BTreeSet<usize> = (0..=5).collect();
        let d = edge_deck_decomposition(5, 5, &all, &store()).unwrap();
        let sz = SizeMap::edge_count(&d).unwrap();
        let strata = stratify_by_size(&d, &sz).unwrap();
        assert_eq!(strata.len(), 6);
        assert!(strata.iter().all(|(_, s)| validate_atomic(s).is_none()));

        let id = Decomposition::identity(d.distinguished.clone(), d.classes.clone()).unwrap();
        for (_, s) in stratify_by_size(&id, &sz).unwrap() {
            assert!(s.molecules.is_empty());
        }

        let small = edge_deck_decomposition(3, 1, &all, &store()).unwrap();
        let sz = SizeMap::edge_count(&small).unwrap();
        assert!(stratify_by_size(&small, &sz).is_err());
    }

    #[test]
    fn size_theorem_examples() {
        let all: BTreeSet<usize> = (0..=3).collect();
        let d = edge_deck_decomposition(4, 3, &all, &store()).unwrap();
        let sz = SizeMap::edge_count(&d).unwrap();
        assert!(!check_size_reconstruction_theorem(&d, &sz).unwrap());

        let id = Decomposition::identity(d.distinguished.clone(), d.classes.clone()).unwrap();
        assert!(check_size_reconstruction_theorem(&id, &sz).unwrap());

        let high: BTreeSet<usize> = [4, 5].into_iter().collect();
        let d = edge_deck_decomposition(5, 5, &high, &store()).unwrap();
        let sz = SizeMap::edge_count(&d).unwrap();
        assert!(check_size_reconstruction_theorem(&d, &sz).unwrap());
    }

    #[test]
    fn unrecognizable_size_is_a_precondition_error() {
        let classes = labels(&["e", "a", "b", "c"]);
        let mut pieces = BTreeMap::new();
        pieces.insert("c".to_string(), vec![("a".to_string(), 2)]);
        pieces.insert("b".to_string(), vec![("a".to_string(), 2)]);
        let d = Decomposition::new("e".into(), classes, pieces).unwrap();
        let sizes = [("e", 0), ("a", 1), ("b", 2), ("c", 3)]
            .into_iter()
            .map(|(c, s)| (c.to_string(), s))
            .collect();
        let err = check_size_reconstruction_theorem(&d, &SizeMap { sizes }).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn setting_file_round_trip() {
        let s = deck_finite_setting(DeckKind::Edge, 4, 2, &store()).unwrap();
        let json = serde_json::to_string(&s.to_file()).unwrap();
        assert_eq!(FiniteSetting::from_file(serde_json::from_str(&json).unwrap()).unwrap(), s);
        let binary = FiniteSetting::from_fn(labels(&["x"]), |_| vec![0xff, 0x00]).unwrap();
        let file = binary.to_file();
        assert!(file.data["x"].starts_with("b64:"));
        assert_eq!(FiniteSetting::from_file(file).unwrap(), binary);
        let missing = SettingFile {
            classes: labels(&["x", "y"]),
            data: [("x".to_string(), "1".to_string())].into_iter().collect(),
        };
        assert!(FiniteSetting::from_file(missing).is_err());
    }
}
