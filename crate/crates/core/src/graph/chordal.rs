use super::Graph;
use crate::error::Result;
use crate::set::NodeSet;

/// Outcome of a chordality check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chordality {
    /// Perfect elimination order: each node is simplicial among the nodes after it.
    Chordal(Vec<usize>),
    /// A chordless cycle of length at least 4, in traversal order.
    NotChordal(Vec<usize>),
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal(_))
    }
}

/// Maximum cardinality search; returns nodes in visiting order.
pub(crate) fn mcs_order(g: &Graph) -> Vec<usize> {
    let d = g.d();
    let mut weight = vec![0usize; d];
    let mut done = NodeSet::EMPTY;
    let mut order = Vec::with_capacity(d);
    for _ in 0..d {
        let v = (0..d)
            .filter(|&v| !done.contains(v))
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unvisited node");
        done.insert(v);
        order.push(v);
        for u in g.neighbors(v).difference(done).iter() {
            weight[u] += 1;
        }
    }
    order
}

/// Tests chordality by maximum cardinality search. On success the reversed
/// search order is a perfect elimination order; otherwise a chordless cycle
/// is returned as witness.
pub fn is_chordal(g: &Graph) -> Result<Chordality> {
    g.require_connected()?;
    let mut peo = mcs_order(g);
    peo.reverse();
    let pos: Vec<usize> = {
        let mut p = vec![0; g.d()];
        for (k, &v) in peo.iter().enumerate() {
            p[v] = k;
        }
        p
    };
    for (k, &v) in peo.iter().enumerate() {
        let later: NodeSet = g.neighbors(v).iter().filter(|&u| pos[u] > k).collect();
        if !g.is_complete_set(later) {
            let cycle = cycle_through(g, v).or_else(|| chordless_cycle(g)).expect("non-chordal graph has a chordless cycle");
            return Ok(Chordality::NotChordal(cycle));
        }
    }
    Ok(Chordality::Chordal(peo))
}

/// Some chordless cycle of length at least 4, if one exists.
pub fn chordless_cycle(g: &Graph) -> Option<Vec<usize>> {
    (0..g.d()).find_map(|v| cycle_through(g, v))
}

/// A chordless cycle through `v`: for two non-adjacent neighbours `u`, `w`
/// of `v`, a shortest `u`-`w` path avoiding the rest of the closed
/// neighbourhood of `v` closes such a cycle.
fn cycle_through(g: &Graph, v: usize) -> Option<Vec<usize>> {
    let nb = g.neighbors(v);
    for u in nb.iter() {
        for w in nb.iter().filter(|&w| w > u && !g.has_edge(u, w)) {
            let allowed = g.nodes().difference(nb.with(v)).with(u).with(w);
            if let Some(path) = shortest_path(g, u, w, allowed) {
                let mut cycle = vec![v];
                cycle.extend(path);
                return Some(cycle);
            }
        }
    }
    None
}

fn shortest_path(g: &Graph, from: usize, to: usize, allowed: NodeSet) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; g.d()];
    let mut seen = NodeSet::singleton(from);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for y in g.neighbors(x).intersection(allowed).difference(seen).iter() {
            seen.insert(y);
            parent[y] = x;
            queue.push_back(y);
        }
    }
    None
}
