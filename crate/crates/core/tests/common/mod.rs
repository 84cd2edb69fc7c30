//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use deckforge::abelian::{snf, IntMatrix};
use deckforge::cache::CatalogStore;
use deckforge::catalog::max_edges;
use deckforge::deck::{edge_deck, Deck, DeckKind};
use deckforge::graph::{disjoint_union, CanonicalGraph, RawGraph};
use deckforge::recon::{DegreePartition, Decomposition, FiniteSetting, SizeMap};
use deckforge::Limits;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn store() -> CatalogStore {
    CatalogStore::uncached(Limits::default())
}

/// A runner with a fixed seed and an exact case count.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

pub fn permutations(v: usize) -> Vec<Vec<usize>> {
    if v == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(v - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, v - 1);
            out.push(q);
        }
    }
    out
}

/// Lexicographically least sorted edge list over all relabelings.
pub fn brute_canonical(g: &RawGraph) -> String {
    let v = g.vertex_count();
    let best = permutations(v)
        .into_iter()
        .map(|p| {
            let mut edges: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                .collect();
            edges.sort();
            edges
        })
        .min()
        .unwrap_or_default();
    let body: Vec<String> = best.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    format!("G{v}:{}", body.join(","))
}

pub fn arb_raw_graph(max_v: usize) -> impl Strategy<Value = RawGraph> {
    (0..=max_v).prop_flat_map(|v| {
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e);
            RawGraph::new(v, edges).expect("valid edges")
        })
    })
}

pub fn arb_graph_and_perm(max_v: usize) -> impl Strategy<Value = (RawGraph, Vec<usize>)> {
    arb_raw_graph(max_v).prop_flat_map(|g| {
        let v = g.vertex_count();
        (Just(g), Just((0..v).collect::<Vec<_>>()).prop_shuffle())
    })
}

pub fn arb_canonical(max_v: usize) -> impl Strategy<Value = CanonicalGraph> {
    arb_raw_graph(max_v).prop_map(|g| deckforge::graph::canonicalize(&g))
}

pub fn arb_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (0..=max_dim, 0..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-bound..=bound, r * c).prop_map(move |xs| {
            IntMatrix::new(r, c, xs.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

/// `U m V = D`, both transforms unimodular, `D` diagonal with a divisibility chain.
pub fn snf_certificate_holds(m: &IntMatrix) -> bool {
    snf(m).certify(m).is_ok()
}

/// Reduced row echelon form over the rationals; returns pivot columns.
pub fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn to_rational(xs: &[BigInt]) -> Vec<BigRational> {
    xs.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Dimension of the rational nullspace of `m`.
pub fn rational_nullity(m: &IntMatrix) -> usize {
    let mut rows: Vec<Vec<BigRational>> = (0..m.rows()).map(|r| to_rational(m.row(r))).collect();
    m.cols() - rref(&mut rows).len()
}

/// Whether `x` is an integer combination of `basis` (assumed independent).
pub fn in_integer_span(basis: &[Vec<BigInt>], x: &[BigInt]) -> bool {
    // Solve sum c_i b_i = x over Q via the augmented transpose system.
    let n = x.len();
    let d = basis.len();
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| BigRational::from_integer(b[j].clone())).collect();
            row.push(BigRational::from_integer(x[j].clone()));
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.contains(&d) {
        return false;
    }
    let mut coeffs = vec![BigRational::zero(); d];
    for (r, &c) in pivots.iter().enumerate() {
        coeffs[c] = rows[r][d].clone();
    }
    coeffs.iter().all(|c| c.is_integer())
}

/// Every integer vector with entries in `[-b, b]` in the kernel of `m`.
pub fn kernel_box_points(m: &IntMatrix, b: i64) -> Vec<Vec<BigInt>> {
    let n = m.cols();
    let width = (2 * b + 1) as usize;
    let total = width.pow(n as u32);
    (0..total)
        .filter_map(|mut idx| {
            let x: Vec<BigInt> = (0..n)
                .map(|_| {
                    let c = (idx % width) as i64 - b;
                    idx /= width;
                    BigInt::from(c)
                })
                .collect();
            m.mul_vec(&x).unwrap().iter().all(Zero::is_zero).then_some(x)
        })
        .collect()
}

/// Edge deck with the empty deck for edgeless graphs.
pub fn deck_or_empty(g: &CanonicalGraph) -> Deck {
    if g.edge_count() == 0 {
        Deck::empty(DeckKind::Edge)
    } else {
        edge_deck(g).unwrap()
    }
}

/// `ED(G + H) = sum_{C in ED(G)} [C + H] + sum_{C' in ED(H)} [G + C']`.
pub fn leibniz_holds(g: &CanonicalGraph, h: &CanonicalGraph) -> bool {
    let lhs = deck_or_empty(&disjoint_union(g, h).unwrap());
    let mut cards = Vec::new();
    for (c, m) in deck_or_empty(g).cards() {
        cards.extend(std::iter::repeat_n(disjoint_union(c, h).unwrap(), *m));
    }
    for (c, m) in deck_or_empty(h).cards() {
        cards.extend(std::iter::repeat_n(disjoint_union(g, c).unwrap(), *m));
    }
    lhs == Deck::from_cards(DeckKind::Edge, cards)
}

/// Graph pairs with at least one edge between them.
pub fn arb_leibniz_pair() -> impl Strategy<Value = (CanonicalGraph, CanonicalGraph)> {
    (arb_canonical(5), arb_canonical(5)).prop_filter("needs an edge", |(g, h)| g.edge_count() + h.edge_count() > 0)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

/// Block keys over `n` classes.
pub fn arb_partition(max_classes: usize) -> impl Strategy<Value = DegreePartition> {
    (1..=max_classes).prop_flat_map(|n| {
        proptest::collection::vec(0..n, n).prop_map(move |keys| partition_from_keys(n, &keys))
    })
}

pub fn partition_from_keys(n: usize, keys: &[usize]) -> DegreePartition {
    let mut blocks: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        blocks.entry(*k).or_default().push(format!("c{i}"));
    }
    let blocks: Vec<Vec<String>> = blocks.into_values().collect();
    DegreePartition::from_blocks(labels(n), &blocks).unwrap()
}

/// Three partitions over one class list.
pub fn arb_partition_triple(max_classes: usize) -> impl Strategy<Value = [DegreePartition; 3]> {
    (1..=max_classes).prop_flat_map(|n| {
        let keys = proptest::collection::vec(0..n, n);
        (keys.clone(), keys.clone(), keys).prop_map(move |(a, b, c)| {
            [partition_from_keys(n, &a), partition_from_keys(n, &b), partition_from_keys(n, &c)]
        })
    })
}

/// Three finite settings (small integer data) over one class list.
pub fn arb_setting_triple(max_classes: usize) -> impl Strategy<Value = [FiniteSetting; 3]> {
    (1..=max_classes).prop_flat_map(|n| {
        let data = proptest::collection::vec(0u8..3, n);
        (data.clone(), data.clone(), data).prop_map(move |(a, b, c)| {
            let make = |d: Vec<u8>| {
                let map = labels(n).into_iter().zip(d.into_iter().map(|x| vec![x])).collect();
                FiniteSetting::new(labels(n), map).unwrap()
            };
            [make(a), make(b), make(c)]
        })
    })
}

/// A random decomposition with a size map: class `c0` is distinguished with
/// size 0, the other sizes cover at least `{1, 2}`, and decomposed objects
/// break into at least two strictly smaller non-distinguished pieces.
pub fn arb_decomposition() -> impl Strategy<Value = (Decomposition, SizeMap)> {
    (3usize..=9).prop_flat_map(|n| {
        let sizes = proptest::collection::vec(1u64..=4, n - 3);
        let choices = proptest::collection::vec((any::<bool>(), proptest::collection::vec(0usize..64, 2..=3)), n);
        (Just(n), sizes, choices).prop_map(|(n, extra, choices)| {
            let mut sizes = vec![0u64, 1, 2];
            sizes.extend(extra);
            let names = labels(n);
            let mut pieces = BTreeMap::new();
            for (i, (decompose, picks)) in choices.into_iter().enumerate() {
                if i == 0 || !decompose {
                    continue;
                }
                let smaller: Vec<usize> = (1..n).filter(|&j| sizes[j] < sizes[i]).collect();
                if smaller.is_empty() {
                    continue;
                }
                let mut ps: BTreeMap<String, usize> = BTreeMap::new();
                for p in picks {
                    *ps.entry(names[smaller[p % smaller.len()]].clone()).or_default() += 1;
                }
                pieces.insert(names[i].clone(), ps.into_iter().collect::<Vec<_>>());
            }
            let d = Decomposition::new(names[0].clone(), names.clone(), pieces).unwrap();
            let sz = SizeMap {
                sizes: names.into_iter().zip(sizes).collect(),
            };
            (d, sz)
        })
    })
}

/// All classes on `v` vertices with at least one edge, for sampling.
pub fn classes_with_edges(v: usize) -> Vec<CanonicalGraph> {
    let s = store();
    (1..=max_edges(v))
        .flat_map(|n| s.stratum(v, n).unwrap().classes().to_vec())
        .collect()
}

pub fn factorial(v: usize) -> BigInt {
    (1..=v).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn is_primitive(x: &[BigInt]) -> bool {
    x.iter().fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, c)).is_one()
}

pub fn abs_max(x: &[BigInt]) -> BigInt {
    x.iter().map(|c| c.abs()).max().unwrap_or_default()
}

pub fn distinct<T: Ord + Clone>(xs: &[T]) -> usize {
    xs.iter().cloned().collect::<BTreeSet<_>>().len()
}

/// Distinct labeled graphs in the orbit of `g`.
pub fn orbit_size(g: &CanonicalGraph) -> usize {
    let raw = g.to_raw();
    permutations(g.vertex_count())
        .into_iter()
        .map(|p| {
            let mut e = raw.relabel(&p).unwrap().edges().to_vec();
            e.sort();
            e
        })
        .collect::<BTreeSet<_>>()
        .len()
}
