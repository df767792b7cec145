use super::Graph;
use crate::error::{Error, Result};
use crate::set::NodeSet;
use std::collections::BTreeSet;

/// Chain graph over nodes `0..d`. Arrows `(from, to)` point from a later
/// block to an earlier one; `lines` are full undirected lines and `dashed`
/// are the dashed lines of joint responses in a regression graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainGraph {
    pub d: usize,
    pub arrows: Vec<(usize, usize)>,
    pub lines: Vec<(usize, usize)>,
    pub dashed: Vec<(usize, usize)>,
    /// Blocks in elimination order (responses first).
    pub blocks: Vec<NodeSet>,
}

/// Which equivalence criterion applies to a pair of chain graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// LWF chain graphs: equal minimal complexes.
    Lwf,
    /// Regression graphs: equal collision Vs.
    Regression,
}

impl ChainGraph {
    pub fn skeleton(&self) -> Graph {
        let mut g = Graph::empty(self.d);
        for &(a, b) in self.arrows.iter().chain(&self.lines).chain(&self.dashed) {
            g.add_edge(a, b);
        }
        g
    }

    fn parents(&self, v: usize) -> NodeSet {
        self.arrows.iter().filter(|&&(_, t)| t == v).map(|&(f, _)| f).collect()
    }

    fn line_graph(&self) -> Graph {
        let mut g = Graph::empty(self.d);
        for &(a, b) in &self.lines {
            g.add_edge(a, b);
        }
        g
    }
}

/// Orients `g` along an elimination order of node-sets: arrows run from
/// nodes remaining after a block into the block, lines stay within blocks,
/// and all nodes not listed form the final block. Each connected piece of a
/// block must have a complete set of remaining neighbours, which is what
/// rules out minimal complexes.
pub fn orient(g: &Graph, scheme: &[NodeSet]) -> Result<ChainGraph> {
    let mut rest = g.nodes();
    let mut blocks = Vec::new();
    for (k, &b) in scheme.iter().enumerate() {
        if b.is_empty() || !b.is_subset(rest) {
            return Err(Error::InvalidScheme(format!("step {} uses nodes {} not remaining", k + 1, b)));
        }
        let after = rest.difference(b);
        for comp in g.components(b) {
            let pa = g.boundary(comp).intersection(after);
            if !g.is_complete_set(pa) {
                return Err(Error::InvalidScheme(format!(
                    "step {}: neighbours {} of {} are not complete",
                    k + 1,
                    pa,
                    comp
                )));
            }
        }
        blocks.push(b);
        rest = after;
    }
    if rest.is_empty() {
        return Err(Error::InvalidScheme("scheme leaves no final block".into()));
    }
    blocks.push(rest);

    let mut block_of = vec![0; g.d()];
    for (k, b) in blocks.iter().enumerate() {
        for v in b.iter() {
            block_of[v] = k;
        }
    }
    let mut arrows = Vec::new();
    let mut lines = Vec::new();
    for (i, j) in g.edges() {
        match block_of[i].cmp(&block_of[j]) {
            std::cmp::Ordering::Equal => lines.push((i, j)),
            std::cmp::Ordering::Less => arrows.push((j, i)),
            std::cmp::Ordering::Greater => arrows.push((i, j)),
        }
    }
    Ok(ChainGraph { d: g.d(), arrows, lines, dashed: Vec::new(), blocks })
}

/// Minimal complexes `a -> c1 - ... - ck <- b` as `(a, b, {c1..ck})` with `a < b`.
pub fn minimal_complexes(c: &ChainGraph) -> BTreeSet<(usize, usize, NodeSet)> {
    let skel = c.skeleton();
    let lines = c.line_graph();
    let mut out = BTreeSet::new();
    for comp in lines.components(NodeSet::full(c.d)) {
        let pa: NodeSet = comp.iter().fold(NodeSet::EMPTY, |acc, v| acc.union(c.parents(v)));
        for a in pa.iter() {
            for b in pa.iter().filter(|&b| b > a && !skel.has_edge(a, b)) {
                let ch_a: NodeSet = comp.iter().filter(|&v| c.parents(v).contains(a)).collect();
                let ch_b: NodeSet = comp.iter().filter(|&v| c.parents(v).contains(b)).collect();
                for start in ch_a.iter() {
                    let mut path = vec![start];
                    extend_paths(&skel, &lines, comp, a, b, ch_b, &mut path, &mut out);
                }
            }
        }
    }
    out
}

/// Depth-first search for chordless line paths from a child of `a` to a
/// child of `b`. Invariant: path nodes after the first are not adjacent to
/// `a`, and nodes before the last are not adjacent to `b`.
#[allow(clippy::too_many_arguments)]
fn extend_paths(
    skel: &Graph,
    lines: &Graph,
    comp: NodeSet,
    a: usize,
    b: usize,
    ch_b: NodeSet,
    path: &mut Vec<usize>,
    out: &mut BTreeSet<(usize, usize, NodeSet)>,
) {
    let last = *path.last().expect("non-empty path");
    let on_path: NodeSet = path.iter().copied().collect();
    if ch_b.contains(last) {
        out.insert((a, b, on_path));
    }
    if skel.has_edge(b, last) {
        return;
    }
    for next in lines.neighbors(last).intersection(comp).difference(on_path).iter() {
        if skel.has_edge(a, next) || lines.neighbors(next).intersection(on_path) != NodeSet::singleton(last) {
            continue;
        }
        path.push(next);
        extend_paths(skel, lines, comp, a, b, ch_b, path, out);
        path.pop();
    }
}

/// Collision Vs `i *-> k <-* j` of a regression graph as `(i, j, k)` with
/// `i < j`: both edges at `k` are arrowheads into `k` or dashed lines.
pub fn collision_vs(c: &ChainGraph) -> BTreeSet<(usize, usize, usize)> {
    let skel = c.skeleton();
    let mut into = vec![NodeSet::EMPTY; c.d];
    for &(f, t) in &c.arrows {
        into[t].insert(f);
    }
    for &(x, y) in &c.dashed {
        into[x].insert(y);
        into[y].insert(x);
    }
    let mut out = BTreeSet::new();
    for (k, &sources) in into.iter().enumerate() {
        for i in sources.iter() {
            for j in sources.iter().filter(|&j| j > i && !skel.has_edge(i, j)) {
                out.insert((i, j, k));
            }
        }
    }
    out
}

/// Markov equivalence of two chain graphs with the same skeleton.
pub fn is_markov_equivalent(c1: &ChainGraph, c2: &ChainGraph, criterion: Criterion) -> Result<bool> {
    if c1.d != c2.d || c1.skeleton() != c2.skeleton() {
        return Err(Error::DifferentSkeletons);
    }
    match criterion {
        Criterion::Lwf => {
            if !c1.dashed.is_empty() || !c2.dashed.is_empty() {
                return Err(Error::InvalidInput("LWF chain graphs have no dashed lines".into()));
            }
            Ok(minimal_complexes(c1) == minimal_complexes(c2))
        }
        Criterion::Regression => Ok(collision_vs(c1) == collision_vs(c2)),
    }
}
