//! The graded ring spanned by graph classes, with multiplication given by
//! disjoint union and grading by edge count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{disjoint_union, CanonicalGraph};
use crate::kernel_search::{verify_kernel_element, GercWitness, KernelElement};
use crate::named;

/// A finite integer combination of graph classes. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedElement {
    terms: BTreeMap<CanonicalGraph, BigInt>,
}

impl GradedElement {
    pub fn zero() -> Self {
        GradedElement::default()
    }

    /// The class of the empty graph.
    pub fn one() -> Self {
        GradedElement::from_graph(CanonicalGraph::empty())
    }

    pub fn from_graph(g: CanonicalGraph) -> Self {
        GradedElement::from_terms([(g, BigInt::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (CanonicalGraph, BigInt)>) -> Self {
        let mut out = GradedElement::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    fn add_term(&mut self, g: CanonicalGraph, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(g);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&CanonicalGraph, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &CanonicalGraph) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common edge count of all terms; `None` for zero or mixed grades.
    pub fn grade(&self) -> Option<usize> {
        common(self.terms.keys().map(CanonicalGraph::edge_count))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.grade().is_some()
    }

    /// Common vertex count of all terms; `None` for zero or mixed counts.
    pub fn vertex_stratum(&self) -> Option<usize> {
        common(self.terms.keys().map(CanonicalGraph::vertex_count))
    }

    pub fn add(&self, other: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedElement) -> GradedElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedElement {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> GradedElement {
        if k.is_zero() {
            return GradedElement::zero();
        }
        GradedElement {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect(),
        }
    }

    /// Bilinear extension of disjoint union. Fails only if a product graph
    /// exceeds the vertex limit.
    pub fn multiply(&self, other: &GradedElement) -> Result<GradedElement> {
        let left: Vec<_> = self.terms.iter().collect();
        let partial: Vec<Vec<(CanonicalGraph, BigInt)>> = left
            .par_iter()
            .map(|(g, c)| {
                other
                    .terms
                    .iter()
                    .map(|(h, d)| Ok((disjoint_union(g, h)?, *c * d)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(GradedElement::from_terms(partial.into_iter().flatten()))
    }

    pub fn power(&self, q: u32) -> Result<GradedElement> {
        if q == 0 {
            return Err(Error::input("exponent must be at least 1"));
        }
        let mut out = self.clone();
        for _ in 1..q {
            out = out.multiply(self)?;
        }
        Ok(out)
    }
}

fn common(mut values: impl Iterator<Item = usize>) -> Option<usize> {
    let first = values.next()?;
    values.all(|x| x == first).then_some(first)
}

impl fmt::Display for GradedElement {
    /// `1*G4:0-1,2-3 - 1*G4:0-1,0-2`; the zero element prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{c}*{g}")?,
                (0, true) => write!(f, "-{}*{g}", c.abs())?,
                (_, false) => write!(f, " + {c}*{g}")?,
                (_, true) => write!(f, " - {}*{g}", c.abs())?,
            }
        }
        Ok(())
    }
}

impl FromStr for GradedElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expression(s)
    }
}

impl Serialize for GradedElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: BTreeMap<&str, String> = self
            .terms
            .iter()
            .map(|(g, c)| (g.as_str(), c.to_string()))
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GradedElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let terms: BTreeMap<String, String> = BTreeMap::deserialize(deserializer)?;
        terms
            .into_iter()
            .map(|(g, c)| {
                let g = CanonicalGraph::parse_canonical(&g).map_err(D::Error::custom)?;
                let c = c.parse::<BigInt>().map_err(D::Error::custom)?;
                Ok((g, c))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(GradedElement::from_terms)
    }
}

/// Checks that the product of two verified kernel elements is again a kernel
/// element, in the stratum obtained by adding vertex and edge counts.
pub fn check_kernel_closure(x: &GradedElement, y: &GradedElement) -> Result<bool> {
    let mut strata = Vec::with_capacity(2);
    for (name, e) in [("left", x), ("right", y)] {
        let k = KernelElement::from_graded(e)
            .map_err(|err| Error::input(format!("{name} factor: {err}")))?;
        if !verify_kernel_element(&k)? {
            return Err(Error::input(format!("{name} factor {e} is not a kernel element")));
        }
        strata.push(k.stratum());
    }
    let product = x.multiply(y)?;
    let expected = (strata[0].0 + strata[1].0, strata[0].1 + strata[1].1);
    let p = KernelElement::from_graded(&product)
        .map_err(|e| Error::invariant(format!("product of kernel elements: {e}")))?;
    if p.stratum() != expected {
        return Err(Error::invariant(format!(
            "product landed in stratum {:?}, expected {expected:?}",
            p.stratum()
        )));
    }
    verify_kernel_element(&p)
}

/// Multiplies the kernel elements of two witnesses and splits the product
/// into a witness for the summed stratum, of size at most `2 * k_n * k_m`.
pub fn k_bound_compose(wn: &GercWitness, wm: &GercWitness) -> Result<GercWitness> {
    let product = wn.to_kernel_element().to_graded().multiply(&wm.to_kernel_element().to_graded())?;
    if product.is_zero() {
        return Err(Error::invariant("product of witness kernel elements cancelled to zero"));
    }
    let x = KernelElement::from_graded(&product)?;
    let w = GercWitness::from_kernel_element(&x)
        .map_err(|e| Error::invariant(format!("composed witness failed to verify: {e}")))?;
    if w.k() > 2 * wn.k() * wm.k() {
        return Err(Error::invariant(format!(
            "composed witness has size {} > 2 * {} * {}",
            w.k(),
            wn.k(),
            wm.k()
        )));
    }
    Ok(w)
}

/// Parses ring expressions: integers (multiples of the unit), graph strings in
/// any labeling, short names (`II`, `L`, `Claw`, `Tri`, `Paw`, `P4`, `K2`,
/// `E`, optionally in brackets), `+`, `-`, `*`, `^` and parentheses.
pub fn parse_expression(s: &str) -> Result<GradedElement> {
    let mut p = Parser {
        chars: s.chars().map(|c| if c == '−' { '-' } else { c }).collect(),
        pos: 0,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> Error {
        let text: String = self.chars.iter().collect();
        Error::input(format!("ring expression {text:?}, position {}: {msg}", self.pos))
    }

    fn sum(&mut self) -> Result<GradedElement> {
        let mut acc = self.product()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<GradedElement> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                acc = acc.multiply(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<GradedElement> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let q = self.digits().ok_or_else(|| self.error("expected an exponent"))?;
            let q: u32 = q.parse().map_err(|_| self.error("exponent too large"))?;
            return base.power(q).map_err(|e| self.error(&e.to_string()));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<GradedElement> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('[') => {
                self.pos += 1;
                let e = self.atom()?;
                if self.peek() != Some(']') {
                    return Err(self.error("expected ']'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let k: BigInt = self.digits().expect("at a digit").parse().expect("decimal digits");
                Ok(GradedElement::one().scale(&k))
            }
            Some('G') if self.chars.get(self.pos + 1).is_some_and(char::is_ascii_digit) => {
                let text = self.graph_token()?;
                let g = CanonicalGraph::parse_any(&text).map_err(|e| self.error(&e.to_string()))?;
                Ok(GradedElement::from_graph(g))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                named::by_name(&name)
                    .map(GradedElement::from_graph)
                    .ok_or_else(|| self.error(&format!("unknown graph name {name:?}")))
            }
            _ => Err(self.error("expected a term")),
        }
    }

    /// `G<digits>:` followed by `a-b` pairs separated by commas. A `-` is only
    /// part of the token between two vertex labels.
    fn graph_token(&mut self) -> Result<String> {
        let start = self.pos;
        self.pos += 1;
        self.digits();
        if self.peek() != Some(':') {
            return Err(self.error("expected ':' in graph string"));
        }
        self.pos += 1;
        let mut first = true;
        loop {
            let checkpoint = self.pos;
            if !first {
                if self.peek() != Some(',') {
                    break;
                }
                self.pos += 1;
            }
            if self.digits().is_none() {
                if first {
                    break;
                }
                return Err(self.error("expected an edge after ','"));
            }
            if self.peek() != Some('-') || self.digits_at(self.pos + 1).is_none() {
                self.pos = checkpoint;
                return Err(self.error("expected an edge 'a-b'"));
            }
            self.pos += 1;
            self.digits();
            first = false;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn digits_at(&self, i: usize) -> Option<char> {
        self.chars.get(i).copied().filter(char::is_ascii_digit)
    }
}
