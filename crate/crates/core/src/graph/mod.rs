//! Undirected graphs over nodes `0..d`, prime decomposition, tree classes,
//! chain-graph orientation and the partial-closure operator.

mod chain;
mod chordal;
mod classify;
mod closure;
mod decompose;

pub use chain::{is_markov_equivalent, minimal_complexes, collision_vs, orient, ChainGraph, Criterion};
pub use chordal::{chordless_cycle, is_chordal, Chordality};
pub use classify::{classify, fatten, TreeClass};
pub use closure::{partial_closure, EdgeMatrix};
pub use decompose::{elimination_scheme, prime_decomposition, PrimeDecomposition};

use crate::error::{Error, Result};
use crate::set::NodeSet;
use serde::{Deserialize, Serialize};

/// Largest node count supported by the bitmask representation.
pub const MAX_NODES: usize = 64;

/// Simple undirected graph. Adjacency is stored as one bitmask per node;
/// the edge matrix (with unit diagonal) is available via [`Graph::edge_matrix`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    d: usize,
    adj: Vec<NodeSet>,
}

impl Graph {
    /// Builds a graph from 0-based unordered pairs.
    pub fn new(d: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if d < 1 {
            return Err(Error::InvalidInput("graph needs at least one node".into()));
        }
        if d > MAX_NODES {
            return Err(Error::SizeGuard(format!("at most {MAX_NODES} nodes supported")));
        }
        let mut g = Graph::empty(d);
        for &(i, j) in edges {
            for v in [i, j] {
                if v >= d {
                    return Err(Error::NodeOutOfRange { node: v + 1, d });
                }
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self loop at node {}", i + 1)));
            }
            if g.has_edge(i, j) {
                return Err(Error::DuplicateEdge(i.min(j) + 1, i.max(j) + 1));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Builds a graph from 1-based pairs as they appear in files.
    pub fn from_labels(d: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut zero = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            for v in [i, j] {
                if v < 1 || v > d {
                    return Err(Error::NodeOutOfRange { node: v, d });
                }
            }
            zero.push((i - 1, j - 1));
        }
        Graph::new(d, &zero)
    }

    pub fn empty(d: usize) -> Graph {
        Graph { d, adj: vec![NodeSet::EMPTY; d] }
    }

    pub fn complete(d: usize) -> Graph {
        let all = NodeSet::full(d);
        Graph { d, adj: (0..d).map(|i| all.without(i)).collect() }
    }

    /// Builds a graph from an edge matrix; the diagonal is ignored.
    pub fn from_edge_matrix(m: &EdgeMatrix) -> Result<Graph> {
        let d = m.len();
        let mut g = Graph::empty(d);
        for i in 0..d {
            for j in 0..d {
                if i != j && m.get(i, j) {
                    if !m.get(j, i) {
                        return Err(Error::InvalidInput("edge matrix is not symmetric".into()));
                    }
                    g.adj[i].insert(j);
                }
            }
        }
        Ok(g)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nodes(&self) -> NodeSet {
        NodeSet::full(self.d)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i].insert(j);
        self.adj[j].insert(i);
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.adj[i].remove(j);
        self.adj[j].remove(i);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> NodeSet {
        self.adj[i]
    }

    /// Neighbours of a node set outside that set.
    pub fn boundary(&self, s: NodeSet) -> NodeSet {
        s.iter()
            .fold(NodeSet::EMPTY, |acc, i| acc.union(self.adj[i]))
            .difference(s)
    }

    /// Edges as 0-based pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.d {
            for j in self.adj[i].iter().filter(|&j| j > i) {
                out.push((i, j));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Edge matrix with unit diagonal.
    pub fn edge_matrix(&self) -> EdgeMatrix {
        let mut m = EdgeMatrix::identity(self.d);
        for (i, j) in self.edges() {
            m.set(i, j, true);
            m.set(j, i, true);
        }
        m
    }

    pub fn is_complete_set(&self, s: NodeSet) -> bool {
        s.iter().all(|i| s.without(i).is_subset(self.adj[i]))
    }

    /// Node sets of the connected components of the subgraph induced by `within`.
    pub fn components(&self, within: NodeSet) -> Vec<NodeSet> {
        let mut left = within;
        let mut out = Vec::new();
        while let Some(start) = left.first() {
            let comp = self.reach(start, within);
            left = left.difference(comp);
            out.push(comp);
        }
        out
    }

    /// Nodes reachable from `start` inside `within`.
    pub fn reach(&self, start: usize, within: NodeSet) -> NodeSet {
        let mut seen = NodeSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = NodeSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.adj[v]);
            }
            next = next.intersection(within).difference(seen);
            seen = seen.union(next);
            frontier = next;
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.reach(0, self.nodes()) == self.nodes()
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Edge set of the subgraph induced by `s`, as a graph on the same node range.
    pub fn induced(&self, s: NodeSet) -> Graph {
        let adj = (0..self.d)
            .map(|i| if s.contains(i) { self.adj[i].intersection(s) } else { NodeSet::EMPTY })
            .collect();
        Graph { d: self.d, adj }
    }

    /// Number of edges with both ends in `s`.
    pub fn edges_within(&self, s: NodeSet) -> usize {
        s.iter().map(|i| self.adj[i].intersection(s).len()).sum::<usize>() / 2
    }

    /// True if `s` induces a chordless cycle of length at least 4.
    pub fn is_chordless_cycle(&self, s: NodeSet) -> bool {
        s.len() >= 4
            && s.iter().all(|i| self.adj[i].intersection(s).len() == 2)
            && self.components(s).len() == 1
    }

    /// True if `s` induces a cycle: a triangle or a chordless cycle.
    pub fn is_cycle(&self, s: NodeSet) -> bool {
        (s.len() == 3 && self.is_complete_set(s)) || self.is_chordless_cycle(s)
    }

    /// Nodes of the cycle induced by `s` in traversal order starting at its
    /// lowest node, or `None` if `s` does not induce a cycle.
    pub fn cycle_order(&self, s: NodeSet) -> Option<Vec<usize>> {
        if !self.is_cycle(s) {
            return None;
        }
        let start = s.first()?;
        let mut order = vec![start];
        let mut prev = start;
        let mut cur = self.adj[start].intersection(s).first()?;
        while cur != start {
            order.push(cur);
            let next = self.adj[cur].intersection(s).without(prev).first()?;
            prev = cur;
            cur = next;
        }
        Some(order)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let edges: Vec<String> = self.edges().iter().map(|(i, j)| format!("{}{}", i + 1, j + 1)).collect();
        write!(f, "Graph(d={}, edges=[{}])", self.d, edges.join(","))
    }
}

/// File representation: `{"d": int, "edges": [[i, j], ...]}` with 1-based nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub d: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        GraphFile { d: g.d, edges: g.edges().into_iter().map(|(i, j)| [i + 1, j + 1]).collect() }
    }
}

impl TryFrom<&GraphFile> for Graph {
    type Error = Error;
    fn try_from(f: &GraphFile) -> Result<Graph> {
        let pairs: Vec<(usize, usize)> = f.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_labels(f.d, &pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_reports_connectivity() {
        let diamond = Graph::from_labels(4, &[(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert!(diamond.is_connected());
        assert!(!diamond.has_edge(0, 1));
        assert!(Graph::from_labels(2, &[(1, 2)]).unwrap().is_connected());
        assert!(!Graph::from_labels(3, &[]).unwrap().is_connected());
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(Graph::from_labels(3, &[(1, 4)]), Err(Error::NodeOutOfRange { node: 4, d: 3 }));
        assert_eq!(Graph::from_labels(3, &[(1, 2), (2, 1)]), Err(Error::DuplicateEdge(1, 2)));
        assert!(Graph::new(0, &[]).is_err());
    }

    #[test]
    fn edge_matrix_has_unit_diagonal() {
        let g = Graph::from_labels(3, &[(1, 2)]).unwrap();
        let m = g.edge_matrix();
        assert!((0..3).all(|i| m.get(i, i)));
        assert!(m.get(0, 1) && m.get(1, 0) && !m.get(0, 2));
        assert_eq!(Graph::from_edge_matrix(&m).unwrap(), g);
    }

    #[test]
    fn cycle_order_walks_the_cycle() {
        let c = Graph::from_labels(4, &[(1, 3), (3, 2), (2, 4), (4, 1)]).unwrap();
        assert_eq!(c.cycle_order(c.nodes()), Some(vec![0, 2, 1, 3]));
    }
}
