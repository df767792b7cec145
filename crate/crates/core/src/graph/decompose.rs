use super::Graph;
use crate::error::{Error, Result};
use crate::set::NodeSet;

/// Prime graphs of a connected graph, joined at complete cut-sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeDecomposition {
    /// Node sets of the primes, ordered by size and then lexicographically.
    pub primes: Vec<NodeSet>,
    /// One cut-set per join (a multiset; `primes.len() - 1` entries), same ordering.
    pub cutsets: Vec<NodeSet>,
    /// Joins `(p, q, cutset)` between primes `p < q` forming a tree.
    pub links: Vec<(usize, usize, NodeSet)>,
    /// Default elimination scheme: outer node-sets in removal order.
    pub scheme: Vec<NodeSet>,
    /// The prime remaining after the default scheme.
    pub final_prime: NodeSet,
}

/// MCS-M: minimal elimination ordering with its minimal triangulation.
/// Returns the visiting order, the triangulated adjacency, and the
/// generators (nodes whose label did not increase over their predecessor's).
fn mcs_m(g: &Graph) -> (Vec<usize>, Vec<NodeSet>, NodeSet) {
    let d = g.d();
    let mut weight = vec![0usize; d];
    let mut numbered = NodeSet::EMPTY;
    let mut h = (0..d).map(|v| g.neighbors(v)).collect::<Vec<_>>();
    let mut order = Vec::with_capacity(d);
    let mut generators = NodeSet::EMPTY;
    let mut prev: Option<usize> = None;
    for _ in 0..d {
        let v = (0..d)
            .filter(|&v| !numbered.contains(v))
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unnumbered node");
        if prev.is_some_and(|p| weight[v] <= p) {
            generators.insert(v);
        }
        prev = Some(weight[v]);
        numbered.insert(v);
        order.push(v);

        let open = NodeSet::full(d).difference(numbered);
        let mut hits = NodeSet::EMPTY;
        let mut levels: Vec<usize> = open.iter().map(|u| weight[u]).collect();
        levels.sort_unstable();
        levels.dedup();
        for w in levels {
            // nodes reachable from v through open nodes of weight < w
            let low: NodeSet = open.iter().filter(|&u| weight[u] < w).collect();
            let reach = g.reach(v, low.with(v));
            let touched = g.boundary(reach).union(g.neighbors(v));
            for u in open.iter().filter(|&u| weight[u] == w && touched.contains(u)) {
                hits.insert(u);
            }
        }
        for u in hits.iter() {
            weight[u] += 1;
            h[u].insert(v);
            h[v].insert(u);
        }
    }
    (order, h, generators)
}

/// Decomposes a connected graph into its primes (maximal subgraphs without a
/// complete separator) using MCS-M followed by atom extraction.
pub fn prime_decomposition(g: &Graph) -> Result<PrimeDecomposition> {
    g.require_connected()?;
    let (order, h, generators) = mcs_m(g);
    let mut before = NodeSet::EMPTY;
    let mut earlier = vec![NodeSet::EMPTY; g.d()];
    for &v in &order {
        earlier[v] = before;
        before.insert(v);
    }

    let mut rest = g.nodes();
    let mut atoms: Vec<NodeSet> = Vec::new();
    let mut seps: Vec<NodeSet> = Vec::new();
    for &x in order.iter().rev() {
        if !generators.contains(x) {
            continue;
        }
        let s = h[x].intersection(earlier[x]);
        if g.is_complete_set(s) && s.is_subset(rest) {
            let comp = g.reach(x, rest.difference(s));
            atoms.push(comp.union(s));
            seps.push(s);
            rest = rest.difference(comp);
        }
    }
    atoms.push(rest);

    // join each extracted atom to the first later atom holding its separator
    let mut raw_links = Vec::new();
    for (k, &s) in seps.iter().enumerate() {
        let parent = (k + 1..atoms.len())
            .find(|&j| s.is_subset(atoms[j]))
            .expect("separator lies in a later atom");
        raw_links.push((k, parent, s));
    }

    let mut idx: Vec<usize> = (0..atoms.len()).collect();
    idx.sort_by(|&a, &b| atoms[a].canonical_cmp(&atoms[b]));
    let mut rank = vec![0; atoms.len()];
    for (r, &i) in idx.iter().enumerate() {
        rank[i] = r;
    }
    let primes: Vec<NodeSet> = idx.iter().map(|&i| atoms[i]).collect();
    let mut links: Vec<(usize, usize, NodeSet)> = raw_links
        .into_iter()
        .map(|(a, b, s)| (rank[a].min(rank[b]), rank[a].max(rank[b]), s))
        .collect();
    links.sort();
    let mut cutsets = seps;
    cutsets.sort_by(|a, b| a.canonical_cmp(b));

    let (scheme, final_prime) = scheme_for(&primes, None);
    Ok(PrimeDecomposition { primes, cutsets, links, scheme, final_prime })
}

/// Removes outer node-sets one prime at a time until only `keep` (or, if
/// `None`, the last remaining prime) is left. A prime is eligible when its
/// overlap with the other remaining primes lies inside one of them; the
/// lowest-ranked eligible prime goes first.
fn scheme_for(primes: &[NodeSet], keep: Option<usize>) -> (Vec<NodeSet>, NodeSet) {
    let mut alive: Vec<usize> = (0..primes.len()).collect();
    let mut scheme = Vec::new();
    while alive.len() > 1 {
        let pick = alive.iter().copied().find(|&p| {
            if Some(p) == keep {
                return false;
            }
            let others: Vec<usize> = alive.iter().copied().filter(|&q| q != p).collect();
            let overlap = others.iter().fold(NodeSet::EMPTY, |acc, &q| acc.union(primes[q])).intersection(primes[p]);
            others.iter().any(|&q| overlap.is_subset(primes[q]))
        });
        let p = pick.expect("a junction tree always has an eligible leaf");
        let others = alive.iter().filter(|&&q| q != p).fold(NodeSet::EMPTY, |acc, &q| acc.union(primes[q]));
        scheme.push(primes[p].difference(others));
        alive.retain(|&q| q != p);
    }
    let last = alive.first().map(|&p| primes[p]).unwrap_or(NodeSet::EMPTY);
    (scheme, last)
}

/// Proper node-set elimination scheme leaving `start_prime` (or the default
/// final prime) as the only remaining prime.
pub fn elimination_scheme(g: &Graph, start_prime: Option<NodeSet>) -> Result<Vec<NodeSet>> {
    let dec = prime_decomposition(g)?;
    match start_prime {
        None => Ok(dec.scheme),
        Some(s) => {
            let k = dec.primes.iter().position(|&p| p == s).ok_or_else(|| Error::NotPrime(s.to_string()))?;
            Ok(scheme_for(&dec.primes, Some(k)).0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(d: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_labels(d, e).unwrap()
    }
    fn s(v: &[usize]) -> NodeSet {
        v.iter().map(|i| i - 1).collect()
    }

    #[test]
    fn diamond_has_two_triangles() {
        let dec = prime_decomposition(&g(4, &[(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])).unwrap();
        assert_eq!(dec.primes, vec![s(&[1, 3, 4]), s(&[2, 3, 4])]);
        assert_eq!(dec.cutsets, vec![s(&[3, 4])]);
    }

    #[test]
    fn paw_has_triangle_and_edge() {
        let dec = prime_decomposition(&g(4, &[(1, 2), (1, 3), (2, 3), (3, 4)])).unwrap();
        assert_eq!(dec.primes, vec![s(&[3, 4]), s(&[1, 2, 3])]);
        assert_eq!(dec.cutsets, vec![s(&[3])]);
    }

    #[test]
    fn path_primes_are_edges() {
        let dec = prime_decomposition(&g(4, &[(1, 2), (2, 3), (3, 4)])).unwrap();
        assert_eq!(dec.primes, vec![s(&[1, 2]), s(&[2, 3]), s(&[3, 4])]);
        assert_eq!(dec.cutsets, vec![s(&[2]), s(&[3])]);
        assert_eq!(dec.links.len(), 2);
    }

    #[test]
    fn schemes_follow_requested_start() {
        let diamond = g(4, &[(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(elimination_scheme(&diamond, Some(s(&[2, 3, 4]))).unwrap(), vec![s(&[1])]);
        let ach = g(5, &[(1, 2), (1, 3), (2, 3), (2, 5), (3, 4), (4, 5)]);
        assert_eq!(elimination_scheme(&ach, Some(s(&[1, 2, 3]))).unwrap(), vec![s(&[4, 5])]);
        let star = g(4, &[(1, 2), (1, 3), (1, 4)]);
        assert_eq!(elimination_scheme(&star, None).unwrap(), vec![s(&[2]), s(&[3])]);
        assert!(matches!(elimination_scheme(&star, Some(s(&[2, 3]))), Err(Error::NotPrime(_))));
    }

    #[test]
    fn single_node_graph() {
        let dec = prime_decomposition(&Graph::empty(1)).unwrap();
        assert_eq!(dec.primes, vec![s(&[1])]);
        assert!(dec.cutsets.is_empty() && dec.scheme.is_empty());
    }
}
