#![allow(dead_code)]

use hollowtree::bintab::{
    compress, fwht, hadamard, lambda_of, marginalize, moments, pi_of_lambda, tau_parametrize, CountTable, InteractionKind, InteractionSet,
    ProbTable,
};
use hollowtree::graph::{classify, is_chordal, partial_closure, prime_decomposition, Chordality, EdgeMatrix, Graph};
use hollowtree::infer::{decomposed_tests, fit_hollow_tree, ipf_fit, IpfOptions, Model};
use hollowtree::lincalc::{concentration_and_theta, partial_invert};
use hollowtree::NodeSet;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::path::PathBuf;

pub type Check = Result<(), String>;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Collects failed sub-checks into one message.
#[derive(Default)]
pub struct Failures(pub Vec<String>);

impl Failures {
    pub fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        if !((got - want).abs() <= tol) {
            self.0.push(format!("{what}: got {got:.6}, want {want} +- {tol}"));
        }
    }
    pub fn ensure(&mut self, what: &str, ok: bool) {
        if !ok {
            self.0.push(what.to_string());
        }
    }
    pub fn finish(self) -> Check {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self.0.join("; "))
        }
    }
}

pub fn pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect()
}

pub fn graph_from_mask(d: usize, mask: u64) -> Graph {
    let edges: Vec<(usize, usize)> = pairs(d).into_iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| e).collect();
    Graph::new(d, &edges).unwrap()
}

/// All labelled connected graphs on `d` nodes.
pub fn connected_graphs(d: usize) -> Vec<Graph> {
    let m = d * (d - 1) / 2;
    (0..1u64 << m).map(|mask| graph_from_mask(d, mask)).filter(|g| g.is_connected()).collect()
}

/// Connected graphs whose degrees are non-increasing in the node index.
/// Every isomorphism class has such a labelling.
pub fn degree_sorted_connected_graphs(d: usize) -> Vec<Graph> {
    let m = d * (d - 1) / 2;
    let ps = pairs(d);
    (0..1u64 << m)
        .filter(|&mask| {
            let mut deg = vec![0usize; d];
            for (b, &(i, j)) in ps.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    deg[i] += 1;
                    deg[j] += 1;
                }
            }
            deg.windows(2).all(|w| w[0] >= w[1])
        })
        .map(|mask| graph_from_mask(d, mask))
        .filter(|g| g.is_connected())
        .collect()
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..d).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// One representative per isomorphism class of connected graphs on `d` nodes.
pub fn connected_graphs_up_to_iso(d: usize) -> Vec<Graph> {
    let perms = permutations(d);
    let ps = pairs(d);
    let index = |i: usize, j: usize| ps.iter().position(|&e| e == (i.min(j), i.max(j))).unwrap();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g in connected_graphs(d) {
        let canon = perms
            .iter()
            .map(|p| g.edges().iter().map(|&(i, j)| 1u64 << index(p[i], p[j])).sum::<u64>())
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(g);
        }
    }
    out
}

fn is_connected_within(g: &Graph, s: NodeSet) -> bool {
    match s.first() {
        None => true,
        Some(v) => g.reach(v, s) == s,
    }
}

/// Brute-force chordality: no induced cycle on four or more nodes.
pub fn oracle_is_chordal(g: &Graph) -> bool {
    let d = g.d();
    (0..1u64 << d).map(NodeSet).filter(|s| s.len() >= 4).all(|s| !oracle_is_chordless_cycle(g, s))
}

pub fn oracle_is_chordless_cycle(g: &Graph, s: NodeSet) -> bool {
    s.len() >= 4 && s.iter().all(|v| g.neighbors(v).intersection(s).len() == 2) && is_connected_within(g, s)
}

/// Brute-force primes: maximal node sets inducing a connected subgraph
/// without a complete separator.
pub fn oracle_primes(g: &Graph) -> BTreeSet<u64> {
    let d = g.d();
    let mut candidates = Vec::new();
    for s in (1..1u64 << d).map(NodeSet) {
        if !is_connected_within(g, s) {
            continue;
        }
        let has_clique_sep = s.subsets().any(|t| {
            t.len() < s.len() && g.is_complete_set(t) && !s.difference(t).is_empty() && !is_connected_within(g, s.difference(t))
        });
        if !has_clique_sep {
            candidates.push(s);
        }
    }
    candidates
        .iter()
        .filter(|s| !candidates.iter().any(|t| t != *s && s.is_subset(*t)))
        .map(|s| s.0)
        .collect()
}

pub fn suite_graph_oracle(max_d: usize) -> Check {
    let mut count = 0;
    for d in 1..=max_d {
        let graphs = if d <= 6 { connected_graphs(d) } else { degree_sorted_connected_graphs(d) };
        for g in graphs {
            count += 1;
            let chordal = is_chordal(&g).map_err(|e| e.to_string())?;
            if chordal.is_chordal() != oracle_is_chordal(&g) {
                return Err(format!("chordality differs on {g:?}"));
            }
            match &chordal {
                Chordality::Chordal(peo) => {
                    for (k, &v) in peo.iter().enumerate() {
                        let later: NodeSet = peo[k + 1..].iter().copied().filter(|&u| g.has_edge(u, v)).collect();
                        if !g.is_complete_set(later) {
                            return Err(format!("invalid elimination order on {g:?}"));
                        }
                    }
                }
                Chordality::NotChordal(cyc) => {
                    let s: NodeSet = cyc.iter().copied().collect();
                    let closed = (0..cyc.len()).all(|k| g.has_edge(cyc[k], cyc[(k + 1) % cyc.len()]));
                    if !oracle_is_chordless_cycle(&g, s) || s.len() != cyc.len() || !closed {
                        return Err(format!("bad chordless-cycle witness {cyc:?} on {g:?}"));
                    }
                }
            }
            let dec = prime_decomposition(&g).map_err(|e| e.to_string())?;
            let got: BTreeSet<u64> = dec.primes.iter().map(|p| p.0).collect();
            if got != oracle_primes(&g) || got.len() != dec.primes.len() {
                return Err(format!("primes differ on {g:?}: {:?}", dec.primes));
            }
            if dec.cutsets.len() + 1 != dec.primes.len() || dec.links.len() != dec.cutsets.len() {
                return Err(format!("cut-set count wrong on {g:?}"));
            }
            for &(p, q, c) in &dec.links {
                if dec.primes[p].intersection(dec.primes[q]) != c || !g.is_complete_set(c) {
                    return Err(format!("bad link {p}-{q} on {g:?}"));
                }
            }
        }
    }
    if count == 0 {
        return Err("no graphs enumerated".into());
    }
    Ok(())
}

pub fn suite_hadamard_roundtrip(seed: u64) -> Check {
    let mut r = rng(seed);
    for d in 1..=10 {
        let v: Vec<f64> = (0..1 << d).map(|_| r.gen_range(-1.0..1.0)).collect();
        let mut w = v.clone();
        fwht(&mut w);
        fwht(&mut w);
        let scale = (1u64 << d) as f64;
        if v.iter().zip(&w).any(|(a, b)| (a - b / scale).abs() > 1e-12) {
            return Err(format!("fwht round trip failed at d = {d}"));
        }
        if d <= 6 {
            let h = hadamard(d).map_err(|e| e.to_string())?;
            let hh = &h * &h;
            if (hh - DMatrix::<f64>::identity(1 << d, 1 << d) * scale).abs().max() > 1e-12 {
                return Err(format!("H H != 2^d I at d = {d}"));
            }
        }
        if d <= 8 {
            let p = ProbTable::from_weights(&(0..1 << d).map(|_| r.gen_range(0.1..1.0)).collect::<Vec<f64>>()).unwrap();
            let back = pi_of_lambda(&lambda_of(&p).unwrap()).unwrap();
            if p.probs().iter().zip(back.probs()).any(|(a, b)| (a - b).abs() > 1e-12) {
                return Err(format!("lambda round trip failed at d = {d}"));
            }
        }
    }
    Ok(())
}

pub fn random_taus(g: &Graph, r: &mut ChaCha8Rng, lo: f64, hi: f64) -> InteractionSet {
    let pairs: Vec<((usize, usize), f64)> = g
        .edges()
        .into_iter()
        .map(|e| {
            let m = r.gen_range(lo..hi);
            (e, if r.gen_bool(0.5) { m } else { -m })
        })
        .collect();
    InteractionSet::taus(g.d(), &pairs).unwrap()
}

pub fn suite_tau_recursion(seed: u64) -> Check {
    let mut r = rng(seed);
    let k3 = Graph::complete(3);
    for _ in 0..200 {
        let t = random_taus(&k3, &mut r, 0.0, 0.95);
        let p = tau_parametrize(&t, &k3).map_err(|e| e.to_string())?;
        let rho = moments(&p).map_err(|e| e.to_string())?.rho;
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            let (tij, tik, tjk) = (t.pair(i, j), t.pair(i, k), t.pair(j, k));
            let want = (tij + tik * tjk) / (1.0 + tij * tik * tjk);
            if (rho[(i, j)] - want).abs() > 1e-10 {
                return Err(format!("rho{}{} = {} but recursion gives {}", i + 1, j + 1, rho[(i, j)], want));
            }
        }
    }
    Ok(())
}

/// Conditional correlation of `i, j` at each level combination of the rest
/// of `keep`, computed from the margin over `keep`.
pub fn conditional_correlations(p: &ProbTable, keep: NodeSet, i: usize, j: usize) -> Vec<f64> {
    let m = marginalize(p, keep).unwrap();
    let nodes = keep.to_vec();
    let li = nodes.iter().position(|&v| v == i).unwrap();
    let lj = nodes.iter().position(|&v| v == j).unwrap();
    let rest: NodeSet = (0..nodes.len()).filter(|&v| v != li && v != lj).collect();
    let mut out = Vec::new();
    for e in 0..1usize << rest.len() {
        let mut cell = [0.0; 4];
        for (k, &x) in m.probs().iter().enumerate() {
            if compress(k, rest) == e {
                cell[(k >> li & 1) | (k >> lj & 1) << 1] += x;
            }
        }
        let [a, b, c, dd] = cell;
        let corr = (a * dd - b * c) / ((a + b) * (c + dd) * (a + c) * (b + dd)).sqrt();
        out.push(corr);
    }
    out
}

fn sub(m: &DMatrix<f64>, s: NodeSet) -> DMatrix<f64> {
    let v = s.to_vec();
    DMatrix::from_fn(v.len(), v.len(), |a, b| m[(v[a], v[b])])
}

/// Largest deviation between conditional and partial correlations over all
/// pairs within the primes of `g`, and the largest |theta| on a non-edge
/// together with the smallest |theta| on an edge.
pub fn conditional_correlation_gaps(g: &Graph, p: &ProbTable) -> (f64, f64, f64) {
    let rho = moments(p).unwrap().rho;
    let theta = concentration_and_theta(&rho).unwrap().theta;
    let mut max_nonedge: f64 = 0.0;
    let mut min_edge = f64::INFINITY;
    for (i, j) in pairs(g.d()) {
        if g.has_edge(i, j) {
            min_edge = min_edge.min(theta[(i, j)].abs());
        } else {
            max_nonedge = max_nonedge.max(theta[(i, j)].abs());
        }
    }
    let mut gap: f64 = 0.0;
    for prime in prime_decomposition(g).unwrap().primes {
        if prime.len() < 3 {
            continue;
        }
        let local_theta = concentration_and_theta(&sub(&rho, prime)).unwrap().theta;
        let nodes = prime.to_vec();
        for a in 0..nodes.len() {
            for b in a + 1..nodes.len() {
                let partial = local_theta[(a, b)];
                for c in conditional_correlations(p, prime, nodes[a], nodes[b]) {
                    gap = gap.max((c - partial).abs());
                }
            }
        }
    }
    (gap, max_nonedge, min_edge)
}

/// Counterexample graph: the complete graph on five nodes without edge 1-2,
/// whose cut-set {3,4,5} has three nodes.
pub fn counterexample_graph() -> Graph {
    let mut g = Graph::complete(5);
    g.remove_edge(0, 1);
    g
}

pub fn suite_constant_conditional_correlations(seed: u64, max_d: usize) -> Check {
    let mut r = rng(seed);
    let mut hollow = 0;
    for d in 2..=max_d {
        for g in connected_graphs(d) {
            if !classify(&g).unwrap().is_hollow() {
                continue;
            }
            hollow += 1;
            let p = tau_parametrize(&random_taus(&g, &mut r, 0.15, 0.8), &g).unwrap();
            let (gap, nonedge, edge) = conditional_correlation_gaps(&g, &p);
            if gap > 1e-9 || nonedge > 1e-9 || edge < 1e-6 {
                return Err(format!("hollow tree {g:?}: gap {gap:e}, non-edge theta {nonedge:e}, edge theta {edge:e}"));
            }
        }
    }
    // converse: every connected non-hollow graph on up to five nodes breaks one condition
    for d in 3..=5 {
        for g in connected_graphs(d) {
            if classify(&g).unwrap().is_hollow() {
                continue;
            }
            let p = tau_parametrize(&random_taus(&g, &mut r, 0.3, 0.8), &g).unwrap();
            let (gap, nonedge, edge) = conditional_correlation_gaps(&g, &p);
            if gap < 1e-6 && nonedge < 1e-6 && edge > 1e-6 {
                return Err(format!("non-hollow graph {g:?} satisfies both conditions"));
            }
        }
    }
    let g = counterexample_graph();
    let p = tau_parametrize(&random_taus(&g, &mut r, 0.3, 0.8), &g).unwrap();
    let cond = conditional_correlations(&p, NodeSet::full(5), 0, 1);
    let rho = moments(&p).unwrap().rho;
    let partial = concentration_and_theta(&rho).unwrap().theta[(0, 1)];
    if cond.iter().any(|c| c.abs() > 1e-12) || partial.abs() < 1e-4 {
        return Err(format!("counterexample: conditional {cond:?}, partial {partial}"));
    }
    if hollow == 0 {
        return Err("no hollow trees enumerated".into());
    }
    Ok(())
}

pub fn random_spd(n: usize, r: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * (n as f64 * 0.5)
}

pub fn suite_operator_laws(seed: u64) -> Check {
    let mut r = rng(seed);
    let close = |x: &DMatrix<f64>, y: &DMatrix<f64>| (x - y).abs().max() < 1e-9;
    for _ in 0..50 {
        let n = r.gen_range(2..=6);
        let m = random_spd(n, &mut r);
        let a: NodeSet = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        let b: NodeSet = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        let inv = |x: &DMatrix<f64>, s: NodeSet| partial_invert(x, s).map_err(|e| e.to_string());
        if !close(&inv(&inv(&m, a)?, b)?, &inv(&inv(&m, b)?, a)?) {
            return Err("partial inversion not commutative".into());
        }
        if !close(&inv(&inv(&m, a)?, a)?, &m) {
            return Err("partial inversion not undone by repetition".into());
        }
        if !close(&inv(&m, NodeSet::full(n))?, &m.clone().try_inverse().unwrap()) {
            return Err("full partial inversion differs from the inverse".into());
        }
        let s = a.union(b);
        if !s.is_empty() && !close(&sub(&inv(&m, a)?, s), &inv(&sub(&m, s), local(a, s))?) {
            return Err("partial inversion does not commute with taking submatrices".into());
        }

        let e = random_edge_matrix(n, &mut r);
        let zer = |x: &EdgeMatrix, s: NodeSet| partial_closure(x, s).map_err(|e| e.to_string());
        if zer(&zer(&e, a)?, b)? != zer(&zer(&e, b)?, a)? {
            return Err("partial closure not commutative".into());
        }
        if zer(&zer(&e, a)?, a)? != zer(&e, a)? {
            return Err("partial closure not idempotent".into());
        }
        if !s.is_empty() && zer(&e, a)?.submatrix(s) != zer(&e.submatrix(s), local(a, s))? {
            return Err("partial closure does not commute with taking submatrices".into());
        }
    }
    Ok(())
}

fn local(a: NodeSet, s: NodeSet) -> NodeSet {
    s.to_vec().iter().enumerate().filter(|(_, v)| a.contains(**v)).map(|(k, _)| k).collect()
}

/// Edge matrix of a random directed acyclic graph, arrows from higher to lower index.
pub fn random_edge_matrix(n: usize, r: &mut ChaCha8Rng) -> EdgeMatrix {
    let mut e = EdgeMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(0.4) {
                e.set(i, j, true);
            }
        }
    }
    e
}

pub fn random_counts(d: usize, r: &mut ChaCha8Rng) -> CountTable {
    CountTable::new((0..1 << d).map(|_| r.gen_range(1.0..60.0_f64).round()).collect()).unwrap()
}

pub fn suite_fit_routes(seed: u64, max_d: usize) -> Check {
    let mut r = rng(seed);
    let opts = IpfOptions::default();
    let mut n = 0;
    for d in 2..=max_d {
        for g in connected_graphs_up_to_iso(d) {
            if !classify(&g).unwrap().is_hollow() {
                continue;
            }
            n += 1;
            let counts = random_counts(d, &mut r);
            for model in [Model::General, Model::Palindromic] {
                let a = ipf_fit(&counts, &g, model, opts).map_err(|e| e.to_string())?;
                let b = fit_hollow_tree(&counts, &g, model, opts).map_err(|e| e.to_string())?;
                if (a.chi2 - b.chi2).abs() > 1e-6 || a.df != b.df {
                    return Err(format!("{g:?} {model:?}: ipf {} vs per-prime {}", a.chi2, b.chi2));
                }
            }
        }
    }
    if n == 0 {
        return Err("no hollow trees enumerated".into());
    }
    Ok(())
}

/// General Ising table with random main effects and pair terms on the edges.
pub fn random_ising(g: &Graph, r: &mut ChaCha8Rng) -> ProbTable {
    let mut l = InteractionSet::zeros(g.d(), InteractionKind::Lambda);
    for s in 0..g.d() {
        l.set(NodeSet::singleton(s), r.gen_range(-0.5..0.5));
    }
    for (i, j) in g.edges() {
        l.set(NodeSet::from_nodes([i, j]), r.gen_range(-0.8..0.8));
    }
    pi_of_lambda(&l).unwrap()
}

pub fn suite_test_additivity(seed: u64) -> Check {
    let mut r = rng(seed);
    let opts = IpfOptions::default();
    let graphs = [
        Graph::from_labels(5, &[(1, 2), (1, 3), (2, 3), (2, 5), (3, 4), (4, 5)]).unwrap(),
        Graph::from_labels(4, &[(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap(),
        Graph::from_labels(6, &[(1, 2), (2, 3), (3, 4), (4, 1), (4, 5), (5, 6), (6, 4)]).unwrap(),
        Graph::from_labels(5, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5)]).unwrap(),
    ];
    for g in &graphs {
        let exact = CountTable::from_probs(&random_ising(g, &mut r), 1000.0).unwrap();
        let noisy = random_counts(g.d(), &mut r);
        for counts in [exact, noisy] {
            let fit = ipf_fit(&counts, g, Model::General, opts).map_err(|e| e.to_string())?;
            let scheme = prime_decomposition(g).unwrap().scheme;
            let tests = decomposed_tests(&counts, g, &scheme, opts).map_err(|e| e.to_string())?;
            let total: f64 = tests.iter().map(|t| t.statistic).sum();
            let df: usize = tests.iter().map(|t| t.df).sum();
            if (total - fit.chi2).abs() > 1e-6 || df != fit.df {
                return Err(format!("{g:?}: parts {total} on {df} df, total {} on {} df", fit.chi2, fit.df));
            }
        }
    }
    Ok(())
}
