//! Elements of the kernel of the edge-deck map: minimal-mass search, box
//! search over a kernel lattice basis, and self-certifying witnesses against
//! the generalized edge reconstruction statement.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::CatalogStore;
use crate::catalog::StratumCatalog;
use crate::config::Limits;
use crate::deck::{deck_matrix, edge_deck, Deck, DeckKind, DeckMatrix};
use crate::error::{Error, Result};
use crate::graph::CanonicalGraph;
use crate::ring::GradedElement;

/// A formal integer combination of classes of one stratum. Construction does
/// not check membership in the kernel; see [`verify_kernel_element`] and
/// [`KernelElement::certified`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KernelElement {
    v: usize,
    n: usize,
    coefficients: BTreeMap<CanonicalGraph, BigInt>,
}

impl KernelElement {
    pub fn new(
        v: usize,
        n: usize,
        terms: impl IntoIterator<Item = (CanonicalGraph, BigInt)>,
    ) -> Result<Self> {
        let mut coefficients: BTreeMap<CanonicalGraph, BigInt> = BTreeMap::new();
        for (g, c) in terms {
            if g.vertex_count() != v || g.edge_count() != n {
                return Err(Error::input(format!("{g} does not lie in stratum (v={v}, n={n})")));
            }
            *coefficients.entry(g).or_default() += c;
        }
        coefficients.retain(|_, c| !c.is_zero());
        Ok(KernelElement { v, n, coefficients })
    }

    /// Coordinates `x` against the classes of `catalog`.
    pub fn from_vector(catalog: &StratumCatalog, x: &[BigInt]) -> Result<Self> {
        if x.len() != catalog.len() {
            return Err(Error::input(format!(
                "vector of length {} for stratum (v={}, n={}) with {} classes",
                x.len(),
                catalog.vertex_count(),
                catalog.edge_count(),
                catalog.len()
            )));
        }
        KernelElement::new(
            catalog.vertex_count(),
            catalog.edge_count(),
            catalog.iter().cloned().zip(x.iter().cloned()),
        )
    }

    /// Reads a homogeneous ring element as a candidate; all terms must share
    /// one vertex count and one edge count.
    pub fn from_graded(x: &GradedElement) -> Result<Self> {
        let (Some(v), Some(n)) = (x.vertex_stratum(), x.grade()) else {
            return Err(Error::input(format!(
                "{x} is not a nonzero element of a single stratum"
            )));
        };
        KernelElement::new(v, n, x.terms().map(|(g, c)| (g.clone(), c.clone())))
    }

    pub fn to_graded(&self) -> GradedElement {
        GradedElement::from_terms(self.coefficients.iter().map(|(g, c)| (g.clone(), c.clone())))
    }

    pub fn to_vector(&self, catalog: &StratumCatalog) -> Result<Vec<BigInt>> {
        let mut x = vec![BigInt::zero(); catalog.len()];
        for (g, c) in &self.coefficients {
            let i = catalog
                .position(g)
                .ok_or_else(|| Error::input(format!("{g} is not in the given catalog")))?;
            x[i] = c.clone();
        }
        Ok(x)
    }

    pub fn stratum(&self) -> (usize, usize) {
        (self.v, self.n)
    }

    pub fn coefficients(&self) -> &BTreeMap<CanonicalGraph, BigInt> {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Sum of the positive coefficients.
    pub fn mass(&self) -> BigInt {
        self.coefficients.values().filter(|c| c.is_positive()).sum()
    }

    pub fn neg(&self) -> KernelElement {
        KernelElement {
            v: self.v,
            n: self.n,
            coefficients: self.coefficients.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }

    /// Returns `self` if it is a nonzero verified kernel element with
    /// coefficient sum zero.
    pub fn certified(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::invariant(format!(
                "zero element reported as a kernel element of stratum (v={}, n={})",
                self.v, self.n
            )));
        }
        if !verify_kernel_element(&self)? {
            return Err(Error::invariant(format!(
                "{} is not annihilated by the edge-deck map",
                self.to_graded()
            )));
        }
        if !self.coefficients.values().sum::<BigInt>().is_zero() {
            return Err(Error::invariant(format!(
                "kernel element {} has nonzero coefficient sum",
                self.to_graded()
            )));
        }
        Ok(self)
    }
}

/// Formal sum of edge decks `sum c_G * ED(G)`, zero entries removed.
pub fn deck_of_combination<'a>(
    terms: impl IntoIterator<Item = (&'a CanonicalGraph, &'a BigInt)>,
) -> Result<BTreeMap<CanonicalGraph, BigInt>> {
    let mut total: BTreeMap<CanonicalGraph, BigInt> = BTreeMap::new();
    for (g, c) in terms {
        for (card, m) in edge_deck(g)?.cards() {
            *total.entry(card.clone()).or_default() += c * BigInt::from(*m);
        }
    }
    total.retain(|_, c| !c.is_zero());
    Ok(total)
}

/// Recomputes `ED(x)` from the edge decks of the terms, without any matrix,
/// and checks that it vanishes. Elements with edgeless terms have no deck and
/// are rejected as input errors.
pub fn verify_kernel_element(x: &KernelElement) -> Result<bool> {
    if x.n == 0 {
        return Err(Error::input(format!(
            "stratum (v={}, n=0): edgeless graphs have no edge deck",
            x.v
        )));
    }
    Ok(deck_of_combination(&x.coefficients)?.is_empty())
}

/// Two distinct equal-size multisets of classes of one stratum with the same
/// combined edge deck.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GercWitness {
    v: usize,
    n: usize,
    left: Vec<CanonicalGraph>,
    right: Vec<CanonicalGraph>,
    combined_deck: Deck,
}

impl GercWitness {
    /// Splits a kernel element into positive and negative parts. The result
    /// is verified.
    pub fn from_kernel_element(x: &KernelElement) -> Result<Self> {
        let expand = |positive: bool| -> Result<Vec<CanonicalGraph>> {
            let mut out = Vec::new();
            for (g, c) in &x.coefficients {
                if c.is_positive() == positive {
                    let times = usize::try_from(c.abs())
                        .map_err(|_| Error::input(format!("coefficient {c} is too large to expand")))?;
                    out.extend(std::iter::repeat_n(g.clone(), times));
                }
            }
            Ok(out)
        };
        GercWitness::new(x.v, x.n, expand(true)?, expand(false)?)
    }

    /// Builds and verifies a witness.
    pub fn new(v: usize, n: usize, mut left: Vec<CanonicalGraph>, mut right: Vec<CanonicalGraph>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input(format!("stratum (v={v}, n=0) has no edge decks")));
        }
        left.sort();
        right.sort();
        for g in left.iter().chain(&right) {
            if g.vertex_count() != v || g.edge_count() != n {
                return Err(Error::input(format!("{g} does not lie in stratum (v={v}, n={n})")));
            }
        }
        if left.len() != right.len() {
            return Err(Error::input(format!(
                "witness sides have sizes {} and {}",
                left.len(),
                right.len()
            )));
        }
        if left == right || left.is_empty() {
            return Err(Error::input("witness sides must be distinct nonempty multisets"));
        }
        let combined_deck = combined_deck(&left)?;
        if combined_deck != self::combined_deck(&right)? {
            return Err(Error::input(format!(
                "the two sides have different combined edge decks in stratum (v={v}, n={n})"
            )));
        }
        Ok(GercWitness {
            v,
            n,
            left,
            right,
            combined_deck,
        })
    }

    pub fn stratum(&self) -> (usize, usize) {
        (self.v, self.n)
    }

    /// Multiset size of each side.
    pub fn k(&self) -> usize {
        self.left.len()
    }

    pub fn left(&self) -> &[CanonicalGraph] {
        &self.left
    }

    pub fn right(&self) -> &[CanonicalGraph] {
        &self.right
    }

    pub fn combined_deck(&self) -> &Deck {
        &self.combined_deck
    }

    /// `left - right` as a formal sum.
    pub fn to_kernel_element(&self) -> KernelElement {
        let terms = self
            .left
            .iter()
            .map(|g| (g.clone(), BigInt::from(1)))
            .chain(self.right.iter().map(|g| (g.clone(), BigInt::from(-1))));
        KernelElement::new(self.v, self.n, terms).expect("witness terms lie in its stratum")
    }

    /// Adds the same class to both sides, giving a witness one size larger.
    pub fn pad(&self, g: &CanonicalGraph) -> Result<GercWitness> {
        let mut left = self.left.clone();
        let mut right = self.right.clone();
        left.push(g.clone());
        right.push(g.clone());
        GercWitness::new(self.v, self.n, left, right)
    }

    pub fn to_file(&self) -> WitnessFile {
        WitnessFile {
            v: self.v,
            n: self.n,
            k: self.k(),
            left: self.left.iter().map(|g| g.to_string()).collect(),
            right: self.right.iter().map(|g| g.to_string()).collect(),
            combined_deck: self.combined_deck.to_pairs(),
        }
    }

    /// Re-verifies every claim in a witness file, including the recorded deck.
    pub fn from_file(file: &WitnessFile) -> Result<Self> {
        let parse = |side: &[String]| {
            side.iter()
                .map(|s| CanonicalGraph::parse_canonical(s))
                .collect::<Result<Vec<_>>>()
        };
        let w = GercWitness::new(file.v, file.n, parse(&file.left)?, parse(&file.right)?)?;
        if w.k() != file.k {
            return Err(Error::input(format!("witness records k={} but has k={}", file.k, w.k())));
        }
        if Deck::from_pairs(DeckKind::Edge, &file.combined_deck)? != w.combined_deck {
            return Err(Error::input("recorded combined deck does not match the recomputed one"));
        }
        Ok(w)
    }
}

fn combined_deck(side: &[CanonicalGraph]) -> Result<Deck> {
    side.iter()
        .try_fold(Deck::empty(DeckKind::Edge), |acc, g| acc.union(&edge_deck(g)?))
}

/// `{v, n, k, left, right, combined_deck: [[card, multiplicity], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub v: usize,
    pub n: usize,
    pub k: usize,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub combined_deck: Vec<(String, usize)>,
}

/// Outcome of [`min_mass_exact`].
#[derive(Clone, Debug)]
pub struct MinMass {
    pub v: usize,
    pub n: usize,
    /// Smallest failing multiset size, if one was found.
    pub k: Option<usize>,
    pub witness: Option<GercWitness>,
    /// Every size up to this one was searched exhaustively.
    pub exhaustive_up_to: usize,
    /// The search budget ran out before `mass_cap` was reached.
    pub budget_exhausted: bool,
}

/// Column `j` of a deck matrix as small machine integers.
fn small_columns(m: &DeckMatrix) -> Vec<Vec<u32>> {
    (0..m.cols().len())
        .map(|j| {
            m.column(j)
                .iter()
                .map(|x| u32::try_from(x).expect("deck counts are small"))
                .collect()
        })
        .collect()
}

/// Weights of a linear hash: the hash of a sum of columns is the wrapping
/// sum of the column hashes, so multisets are hashed in constant time.
fn column_hashes(columns: &[Vec<u32>]) -> Vec<(u64, u64)> {
    let weight = |r: usize, salt: u8| {
        let mut h = DefaultHasher::new();
        (r, salt).hash(&mut h);
        h.finish()
    };
    let rows = columns.first().map_or(0, Vec::len);
    let weights: Vec<(u64, u64)> = (0..rows).map(|r| (weight(r, 0), weight(r, 1))).collect();
    columns
        .iter()
        .map(|col| {
            col.iter().zip(&weights).fold((0u64, 0u64), |(a, b), (&x, &(w0, w1))| {
                (
                    a.wrapping_add(w0.wrapping_mul(x as u64)),
                    b.wrapping_add(w1.wrapping_mul(x as u64)),
                )
            })
        })
        .collect()
}

fn multiset_sum(columns: &[Vec<u32>], ms: &[usize]) -> Vec<u32> {
    let mut acc = vec![0u32; columns[0].len()];
    for &j in ms {
        for (a, x) in acc.iter_mut().zip(&columns[j]) {
            *a += x;
        }
    }
    acc
}

/// Advances a nondecreasing index sequence over `0..m` in lexicographic order.
fn next_multiset(ms: &mut [usize], m: usize) -> bool {
    let k = ms.len();
    for i in (0..k).rev() {
        if ms[i] + 1 < m {
            let value = ms[i] + 1;
            for x in &mut ms[i..] {
                *x = value;
            }
            return true;
        }
    }
    false
}

enum SizeSearch {
    Found(Vec<usize>, Vec<usize>),
    NotFound,
    OutOfBudget,
}

/// First pair (in lexicographic order of the later multiset) of distinct
/// `k`-multisets with equal column sums.
fn search_size(columns: &[Vec<u32>], hashes: &[(u64, u64)], k: usize, budget: &mut Option<u64>) -> SizeSearch {
    let m = columns.len();
    let mut seen: HashMap<(u64, u64), Vec<Vec<usize>>> = HashMap::new();
    let mut ms = vec![0usize; k];
    loop {
        if let Some(b) = budget.as_mut() {
            if *b == 0 {
                return SizeSearch::OutOfBudget;
            }
            *b -= 1;
        }
        let h = ms.iter().fold((0u64, 0u64), |(a, b), &j| {
            (a.wrapping_add(hashes[j].0), b.wrapping_add(hashes[j].1))
        });
        let bucket = seen.entry(h).or_default();
        if !bucket.is_empty() {
            let sum = multiset_sum(columns, &ms);
            if let Some(earlier) = bucket.iter().find(|e| multiset_sum(columns, e) == sum) {
                return SizeSearch::Found(earlier.clone(), ms);
            }
        }
        bucket.push(ms.clone());
        if !next_multiset(&mut ms, m) {
            return SizeSearch::NotFound;
        }
    }
}

/// Smallest `k <= mass_cap` at which two distinct `k`-multisets of classes of
/// stratum `(v, n)` share a combined edge deck.
///
/// Sizes 1 and 2 are always searched exhaustively by hashing columns and
/// column-pair sums. Larger sizes enumerate multisets under the configured
/// search budget; running out is reported, never hidden.
pub fn min_mass_exact(v: usize, n: usize, mass_cap: usize, store: &CatalogStore) -> Result<MinMass> {
    if mass_cap == 0 {
        return Err(Error::input("mass cap must be at least 1"));
    }
    let matrix = deck_matrix(v, n, DeckKind::Edge, store)?;
    let classes = matrix.cols().classes();
    let mut result = MinMass {
        v,
        n,
        k: None,
        witness: None,
        exhaustive_up_to: 0,
        budget_exhausted: false,
    };
    if classes.is_empty() {
        result.exhaustive_up_to = mass_cap;
        return Ok(result);
    }
    let columns = small_columns(&matrix);
    let hashes = column_hashes(&columns);
    let mut budget = None;
    for k in 1..=mass_cap {
        if k == 3 {
            budget = Some(store.limits().search_budget);
        }
        match search_size(&columns, &hashes, k, &mut budget) {
            SizeSearch::Found(a, b) => {
                let side = |ms: Vec<usize>| ms.into_iter().map(|j| classes[j].clone()).collect();
                let witness = GercWitness::new(v, n, side(a), side(b))
                    .map_err(|e| Error::invariant(format!("min-mass witness failed to verify: {e}")))?;
                result.k = Some(k);
                result.witness = Some(witness);
                result.exhaustive_up_to = k;
                return Ok(result);
            }
            SizeSearch::NotFound => result.exhaustive_up_to = k,
            SizeSearch::OutOfBudget => {
                result.budget_exhausted = true;
                return Ok(result);
            }
        }
    }
    Ok(result)
}

/// All groups of two or more distinct 2-multisets of stratum `(v, n)` with a
/// common combined edge deck, each group and the list sorted.
pub fn mass_two_collisions(v: usize, n: usize, store: &CatalogStore) -> Result<Vec<Vec<[CanonicalGraph; 2]>>> {
    let matrix = deck_matrix(v, n, DeckKind::Edge, store)?;
    let classes = matrix.cols().classes();
    let columns = small_columns(&matrix);
    let mut groups: HashMap<Vec<u32>, Vec<[CanonicalGraph; 2]>> = HashMap::new();
    for i in 0..columns.len() {
        for j in i..columns.len() {
            groups
                .entry(multiset_sum(&columns, &[i, j]))
                .or_default()
                .push([classes[i].clone(), classes[j].clone()]);
        }
    }
    let mut out: Vec<Vec<[CanonicalGraph; 2]>> = groups.into_values().filter(|g| g.len() > 1).collect();
    for g in &mut out {
        g.sort();
    }
    out.sort();
    Ok(out)
}

/// All nonzero lattice points `sum c_i b_i` with `|c_i| <= box_bound`, one per
/// pair `{x, -x}` (first nonzero coordinate positive), each checked against
/// the matrix and against the direct deck computation. Sorted by mass, then
/// by coordinates.
pub fn kernel_mass_search(
    matrix: &DeckMatrix,
    basis: &[Vec<BigInt>],
    box_bound: u32,
    limits: &Limits,
) -> Result<Vec<KernelElement>> {
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let width = 2 * box_bound as u64 + 1;
    let points = u32::try_from(d)
        .ok()
        .and_then(|d| width.checked_pow(d))
        .filter(|&p| p <= limits.max_box_points)
        .ok_or_else(|| {
            Error::resource(
                format!(
                    "box search in stratum (v={}, n={}) with kernel rank {d} and bound {box_bound}",
                    matrix.vertex_count(),
                    matrix.edge_count()
                ),
                limits.max_box_points,
            )
        })?;
    let cols = matrix.cols().len();
    if basis.iter().any(|b| b.len() != cols) {
        return Err(Error::input("basis vectors do not match the matrix width"));
    }
    let bound = box_bound as i64;
    let mut found: Vec<(BigInt, Vec<BigInt>)> = (0..points)
        .into_par_iter()
        .filter_map(|mut index| {
            let mut coeffs = Vec::with_capacity(d);
            for _ in 0..d {
                coeffs.push((index % width) as i64 - bound);
                index /= width;
            }
            // Keep c with first nonzero coefficient positive; this skips 0 and -c.
            match coeffs.iter().find(|&&c| c != 0) {
                Some(&c) if c > 0 => {}
                _ => return None,
            }
            let mut x = vec![BigInt::zero(); cols];
            for (c, b) in coeffs.iter().zip(basis) {
                if *c != 0 {
                    let c = BigInt::from(*c);
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi += &c * bi;
                    }
                }
            }
            if x.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
                for xi in &mut x {
                    *xi = -std::mem::take(xi);
                }
            }
            let mass: BigInt = x.iter().filter(|c| c.is_positive()).sum();
            Some((mass, x))
        })
        .collect();
    found.sort();
    found.dedup();
    found
        .into_iter()
        .map(|(_, x)| {
            if matrix.apply(&x)?.iter().any(|y| !y.is_zero()) {
                return Err(Error::invariant("box search produced a vector outside the kernel"));
            }
            KernelElement::from_vector(matrix.cols(), &x)?.certified()
        })
        .collect()
}
