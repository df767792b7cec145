use super::{is_chordal, prime_decomposition, Graph, PrimeDecomposition};
use crate::error::{Error, Result};
use crate::set::NodeSet;
use serde::{Deserialize, Serialize};

/// Structural class of a connected graph; the most specific label is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreeClass {
    ThinTree,
    BulgedTree,
    HollowTree,
    FattenedTree,
    OtherChordal,
    OtherNonChordal,
    Complete,
}

impl TreeClass {
    /// True for hollow trees and their subclasses.
    pub fn is_hollow(self) -> bool {
        matches!(self, TreeClass::ThinTree | TreeClass::BulgedTree | TreeClass::HollowTree)
    }
}

impl std::fmt::Display for TreeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

pub(crate) fn classify_decomposed(g: &Graph, dec: &PrimeDecomposition) -> TreeClass {
    let all_edges = dec.primes.iter().all(|p| p.len() == 2);
    let small_cuts = dec.cutsets.iter().all(|c| c.len() <= 2);
    let single_cuts = dec.cutsets.iter().all(|c| c.len() == 1);
    if all_edges && g.d() >= 2 {
        return TreeClass::ThinTree;
    }
    if single_cuts && g.d() >= 2 && dec.primes.iter().all(|&p| p.len() == 2 || (p.len() == 3 && g.is_complete_set(p))) {
        return TreeClass::BulgedTree;
    }
    if small_cuts && g.d() >= 2 && dec.primes.iter().all(|&p| p.len() == 2 || g.is_cycle(p)) {
        return TreeClass::HollowTree;
    }
    if g.is_complete_set(g.nodes()) {
        return TreeClass::Complete;
    }
    let chordal = dec.primes.iter().all(|&p| g.is_complete_set(p));
    if !chordal {
        return TreeClass::OtherNonChordal;
    }
    if is_fattened(dec) {
        TreeClass::FattenedTree
    } else {
        TreeClass::OtherChordal
    }
}

/// A chordal graph is a fattened tree when its cut-sets have at most two
/// nodes, at least one prime clique has four or more nodes, and each such
/// clique can be hollowed to a chordless cycle that keeps every two-node
/// cut-set inside it as a cycle edge.
fn is_fattened(dec: &PrimeDecomposition) -> bool {
    if dec.cutsets.iter().any(|c| c.len() > 2) || dec.primes.iter().all(|p| p.len() < 4) {
        return false;
    }
    dec.primes.iter().filter(|p| p.len() >= 4).all(|&p| {
        let mut pairs: Vec<NodeSet> = dec.cutsets.iter().copied().filter(|c| c.len() == 2 && c.is_subset(p)).collect();
        pairs.sort();
        pairs.dedup();
        pairs_fit_in_cycle(p, &pairs)
    })
}

/// Whether node pairs can all be edges of one Hamiltonian cycle on `nodes`:
/// degrees at most two and no closed sub-cycle short of the full cycle.
fn pairs_fit_in_cycle(nodes: NodeSet, pairs: &[NodeSet]) -> bool {
    let mut g = Graph::empty(64);
    for p in pairs {
        let v = p.to_vec();
        g.add_edge(v[0], v[1]);
    }
    if nodes.iter().any(|v| g.neighbors(v).len() > 2) {
        return false;
    }
    if pairs.len() == nodes.len() {
        return g.components(nodes).len() == 1;
    }
    // a forest of paths: every component has one fewer edge than nodes
    g.components(nodes).iter().all(|&c| g.edges_within(c) + 1 == c.len())
}

/// Classifies a connected graph.
pub fn classify(g: &Graph) -> Result<TreeClass> {
    let dec = prime_decomposition(g)?;
    Ok(classify_decomposed(g, &dec))
}

/// Completes every chordless-cycle prime of a hollow tree to a clique.
pub fn fatten(g: &Graph) -> Result<Graph> {
    let dec = prime_decomposition(g)?;
    if !classify_decomposed(g, &dec).is_hollow() {
        return Err(Error::NotHollowTree("fattening needs a hollow tree".into()));
    }
    let mut out = g.clone();
    for &p in dec.primes.iter().filter(|p| p.len() >= 4) {
        for i in p.iter() {
            for j in p.iter().filter(|&j| j > i) {
                out.add_edge(i, j);
            }
        }
    }
    debug_assert!(is_chordal(&out).map(|c| c.is_chordal()).unwrap_or(false));
    Ok(out)
}
