//! Small graphs that come up often, padded with isolated vertices to four
//! vertices so that the classic counterexample pairs live in one stratum.

use crate::graph::CanonicalGraph;

fn graph(s: &str) -> CanonicalGraph {
    CanonicalGraph::parse_canonical(s).expect("named graphs are canonical")
}

/// Two disjoint edges, `2K2`.
pub fn two_edges() -> CanonicalGraph {
    graph("G4:0-1,2-3")
}

/// The path on three vertices plus an isolated vertex, `P3 + K1`.
pub fn cherry() -> CanonicalGraph {
    graph("G4:0-1,0-2")
}

/// The star `K1,3`.
pub fn claw() -> CanonicalGraph {
    graph("G4:0-1,0-2,0-3")
}

/// A triangle plus an isolated vertex, `K3 + K1`.
pub fn triangle() -> CanonicalGraph {
    graph("G4:0-1,0-2,1-2")
}

/// A triangle with a pendant edge.
pub fn paw() -> CanonicalGraph {
    graph("G4:0-1,0-2,0-3,1-2")
}

/// The path on four vertices.
pub fn path4() -> CanonicalGraph {
    graph("G4:0-1,0-2,1-3")
}

/// A single edge on two vertices.
pub fn edge() -> CanonicalGraph {
    graph("G2:0-1")
}

/// Resolves the short names accepted in ring expressions.
pub fn by_name(name: &str) -> Option<CanonicalGraph> {
    Some(match name {
        "II" => two_edges(),
        "L" => cherry(),
        "Claw" => claw(),
        "Tri" => triangle(),
        "Paw" => paw(),
        "P4" => path4(),
        "K2" => edge(),
        "E" => CanonicalGraph::empty(),
        _ => return None,
    })
}
