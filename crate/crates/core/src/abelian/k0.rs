//! K0 of a finitely presented category with covering families: the free
//! abelian group on objects modulo `[A] = sum [A_i]` for each covering family.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::normal_form::{hnf, snf_tracking, Track};
use crate::cache::CatalogStore;
use crate::catalog::max_edges;
use crate::config::Limits;
use crate::deck::edge_deck;
use crate::error::{Error, Result};
use crate::graph::{isolated_vertex_count, CanonicalGraph};
use crate::named;

/// Generators with sparse relation vectors `(generator index, coefficient)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Presentation {
    generators: Vec<String>,
    relations: Vec<Vec<(usize, BigInt)>>,
    index: HashMap<String, usize>,
}

impl K0Presentation {
    /// Validates labels and supports; merges repeated indices within a relation
    /// and drops zero coefficients.
    pub fn new(generators: Vec<String>, relations: Vec<Vec<(usize, BigInt)>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(generators.len());
        for (i, label) in generators.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::input(format!("generator {label:?} listed twice")));
            }
        }
        let relations = relations
            .into_iter()
            .enumerate()
            .map(|(r, terms)| {
                let mut merged: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (i, c) in terms {
                    if i >= generators.len() {
                        return Err(Error::input(format!(
                            "relation {r} refers to generator {i}, but there are only {}",
                            generators.len()
                        )));
                    }
                    *merged.entry(i).or_default() += c;
                }
                Ok(merged.into_iter().filter(|(_, c)| !c.is_zero()).collect())
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(K0Presentation {
            generators,
            relations,
            index,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vec<(usize, BigInt)>] {
        &self.relations
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Dense relation matrix, one row per relation.
    pub fn relation_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.relations.len(), self.generators.len());
        for (r, terms) in self.relations.iter().enumerate() {
            for (i, c) in terms {
                m.set(r, *i, c.clone());
            }
        }
        m
    }

    pub fn to_file(&self) -> PresentationFile {
        PresentationFile {
            generators: self.generators.clone(),
            relations: self
                .relations
                .iter()
                .map(|terms| terms.iter().map(|(i, c)| Term(*i, c.clone())).collect())
                .collect(),
        }
    }

    pub fn from_file(file: PresentationFile) -> Result<Self> {
        K0Presentation::new(
            file.generators,
            file.relations
                .into_iter()
                .map(|terms| terms.into_iter().map(|Term(i, c)| (i, c)).collect())
                .collect(),
        )
    }
}

/// `{generators: [labels], relations: [[[index, coeff], ...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PresentationFile {
    pub generators: Vec<String>,
    pub relations: Vec<Vec<Term>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Term(pub usize, #[serde(with = "crate::bigint_serde")] pub BigInt);

/// A finitely generated abelian group `Z^free_rank + sum Z/d_i`, with the image
/// of every generator. Coordinates list the torsion components first (reduced
/// into `[0, d_i)`), then the free components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Group {
    generators: Vec<String>,
    free_rank: usize,
    torsion: Vec<BigInt>,
    classes: Vec<Vec<BigInt>>,
}

impl K0Group {
    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Invariant factors greater than one, each dividing the next.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn class_of_index(&self, i: usize) -> &[BigInt] {
        &self.classes[i]
    }

    pub fn class_of(&self, label: &str) -> Option<&[BigInt]> {
        self.generators
            .iter()
            .position(|g| g == label)
            .map(|i| self.classes[i].as_slice())
    }

    /// Image of a formal combination of generators, reduced.
    pub fn image(&self, terms: &[(usize, BigInt)]) -> Vec<BigInt> {
        let width = self.torsion.len() + self.free_rank;
        let mut acc = vec![BigInt::zero(); width];
        for (i, c) in terms {
            for (a, x) in acc.iter_mut().zip(&self.classes[*i]) {
                *a += c * x;
            }
        }
        self.reduce(acc)
    }

    fn reduce(&self, mut coords: Vec<BigInt>) -> Vec<BigInt> {
        for (x, d) in coords.iter_mut().zip(&self.torsion) {
            *x = x.mod_floor(d);
        }
        coords
    }

    pub fn to_export(&self) -> K0GroupExport {
        K0GroupExport {
            free_rank: self.free_rank,
            torsion: self.torsion.iter().map(|d| d.to_string()).collect(),
            class_map: self
                .generators
                .iter()
                .zip(&self.classes)
                .map(|(g, c)| (g.clone(), c.iter().map(|x| x.to_string()).collect()))
                .collect(),
        }
    }
}

/// `{free_rank, torsion: [..], class_map: {label: [coords]}}` with decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct K0GroupExport {
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub class_map: BTreeMap<String, Vec<String>>,
}

/// Computes `Z^generators / <relations>` via the Smith normal form of the
/// relation matrix.
///
/// With `D = U R V`, the substitution `x -> x V` carries the row space of `R`
/// onto that of `D`, so generator `j` maps to row `j` of `V`, read modulo the
/// invariant factors. The free coordinates are then put in Hermite form so
/// that they do not depend on the elimination path.
pub fn present_k0(p: &K0Presentation, limits: &Limits) -> Result<K0Group> {
    let g = p.generators.len();
    let cells = p.relations.len() as u64 * g as u64 + g as u64 * g as u64;
    if cells > limits.max_matrix_cells {
        return Err(Error::resource(
            format!(
                "K0 of a presentation with {g} generators and {} relations",
                p.relations.len()
            ),
            limits.max_matrix_cells,
        ));
    }
    let smith = snf_tracking(&p.relation_matrix(), Track::RIGHT);
    let factors = smith.invariant_factors();
    let v = smith.v.expect("right transform tracked");
    let torsion_positions: Vec<usize> = (0..smith.rank).filter(|&i| !factors[i].is_one()).collect();
    let torsion: Vec<BigInt> = torsion_positions.iter().map(|&i| factors[i].clone()).collect();
    let free_rank = g - smith.rank;

    // Free block W (g x free_rank); replace it by the transpose of HNF(W^T).
    let mut free_block = IntMatrix::zeros(free_rank, g);
    for j in 0..g {
        for k in 0..free_rank {
            free_block.set(k, j, v.get(j, smith.rank + k).clone());
        }
    }
    let (free_hnf, _) = hnf(&free_block);

    let classes = (0..g)
        .map(|j| {
            let mut coords: Vec<BigInt> = torsion_positions
                .iter()
                .zip(&torsion)
                .map(|(&i, d)| v.get(j, i).mod_floor(d))
                .collect();
            coords.extend((0..free_rank).map(|k| free_hnf.get(k, j).clone()));
            coords
        })
        .collect();
    let group = K0Group {
        generators: p.generators.clone(),
        free_rank,
        torsion,
        classes,
    };
    for (r, terms) in p.relations.iter().enumerate() {
        if group.image(terms).iter().any(|x| !x.is_zero()) {
            return Err(Error::invariant(format!("K0: relation {r} does not vanish in the quotient")));
        }
    }
    Ok(group)
}

/// The covering structure whose only non-trivial covers are edge decks: one
/// generator per class of `(v, n)` and of `(v, n - 1)`, and one relation
/// `[G] - sum_{C in ED(G)} [C]` per `n`-edge class.
pub fn build_deck_presentation(v: usize, n: usize, store: &CatalogStore) -> Result<K0Presentation> {
    if n == 0 {
        return Err(Error::input(format!(
            "stratum (v={v}, n=0): edgeless graphs have no edge deck"
        )));
    }
    let top = store.stratum(v, n)?;
    let below = store.stratum(v, n - 1)?;
    let generators: Vec<String> = top
        .iter()
        .chain(below.iter())
        .map(|g| g.to_string())
        .collect();
    let relations = top
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let mut terms = vec![(j, BigInt::one())];
            for (card, m) in edge_deck(g)?.cards() {
                let i = below.position(card).ok_or_else(|| {
                    Error::invariant(format!("card {card} of {g} missing from stratum (v={v}, n={})", n - 1))
                })?;
                terms.push((top.len() + i, -BigInt::from(*m)));
            }
            Ok(terms)
        })
        .collect::<Result<Vec<_>>>()?;
    K0Presentation::new(generators, relations)
}

/// The edge-partition covering structure on all graphs with at most `v_max`
/// vertices and `n_max` edges.
///
/// Relations: the empty family covers the empty graph, two copies of an
/// isolated vertex cover it, and every graph is covered by its edges together
/// with its isolated vertices.
pub fn build_gamma_leq_presentation(
    v_max: usize,
    n_max: usize,
    store: &CatalogStore,
) -> Result<K0Presentation> {
    let mut classes: Vec<CanonicalGraph> = Vec::new();
    for v in 0..=v_max {
        for n in 0..=n_max.min(max_edges(v)) {
            classes.extend(store.stratum(v, n)?.classes().iter().cloned());
        }
    }
    let generators: Vec<String> = classes.iter().map(|g| g.to_string()).collect();
    let position = |g: &CanonicalGraph| {
        generators
            .iter()
            .position(|label| label == g.as_str())
            .ok_or_else(|| Error::invariant(format!("{g} is missing from the generator list")))
    };

    let empty = position(&CanonicalGraph::empty())?;
    let mut relations = vec![vec![(empty, BigInt::one())]];
    let vertex = (v_max >= 1)
        .then(|| position(&CanonicalGraph::edgeless(1)))
        .transpose()?;
    if let Some(vertex) = vertex {
        relations.push(vec![(vertex, BigInt::one()), (vertex, BigInt::from(-2))]);
    }
    let edge = (v_max >= 2 && n_max >= 1)
        .then(|| position(&named::edge()))
        .transpose()?;
    for (j, g) in classes.iter().enumerate() {
        if g.vertex_count() == 0 {
            continue;
        }
        let mut terms = vec![(j, BigInt::one())];
        if g.edge_count() > 0 {
            let edge = edge.expect("a graph with an edge implies the edge class is present");
            terms.push((edge, -BigInt::from(g.edge_count())));
        }
        let isolated = isolated_vertex_count(g);
        if isolated > 0 {
            let vertex = vertex.expect("a graph with a vertex implies the vertex class is present");
            terms.push((vertex, -BigInt::from(isolated)));
        }
        relations.push(terms);
    }
    K0Presentation::new(generators, relations)
}

/// Outcome of testing whether an integer invariant is additive over covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoveringCheck {
    Holds,
    /// The invariant, extended linearly, is `value != 0` on relation `relation`.
    Violated { relation: usize, value: BigInt },
}

impl CoveringCheck {
    pub fn holds(&self) -> bool {
        matches!(self, CoveringCheck::Holds)
    }
}

/// Checks that `f`, extended linearly, vanishes on every relation, i.e. that it
/// factors through K0.
pub fn check_covering_invariant<F>(f: F, p: &K0Presentation) -> Result<CoveringCheck>
where
    F: Fn(&str) -> Option<BigInt>,
{
    let values = p
        .generators
        .iter()
        .map(|g| f(g).ok_or_else(|| Error::input(format!("invariant is undefined on generator {g}"))))
        .collect::<Result<Vec<_>>>()?;
    for (r, terms) in p.relations.iter().enumerate() {
        let value: BigInt = terms.iter().map(|(i, c)| c * &values[*i]).sum();
        if !value.is_zero() {
            return Ok(CoveringCheck::Violated { relation: r, value });
        }
    }
    Ok(CoveringCheck::Holds)
}
