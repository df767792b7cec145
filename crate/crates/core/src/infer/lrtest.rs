use super::fit::{ipf_fit, Model};
use super::ipf::IpfOptions;
use crate::bintab::{marginal_vec, CountTable};
use crate::error::{Error, Result};
use crate::graph::{prime_decomposition, Graph};
use crate::set::NodeSet;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    BetweenPrimes,
    WithinPrime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub kind: TestKind,
    /// `[a, b, c]` for a conditional independence test, `[prime]` otherwise.
    pub sets: Vec<NodeSet>,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl TestResult {
    fn new(kind: TestKind, sets: Vec<NodeSet>, statistic: f64, df: usize) -> TestResult {
        let p_value = if df == 0 {
            1.0
        } else {
            ChiSquared::new(df as f64).map(|c| c.sf(statistic.max(0.0))).unwrap_or(f64::NAN)
        };
        TestResult { kind, sets, statistic, df, p_value }
    }

    pub fn label(&self) -> String {
        let s: Vec<String> = self.sets.iter().map(|s| s.to_string()).collect();
        match self.kind {
            TestKind::BetweenPrimes => format!("{} _||_ {} | {}", s[0], s[1], s[2]),
            TestKind::WithinPrime => format!("within {}", s[0]),
        }
    }
}

/// Positions of the nodes of `s` inside the sorted node list of `u`.
fn local(s: NodeSet, u: NodeSet) -> NodeSet {
    u.to_vec().iter().enumerate().filter(|(_, v)| s.contains(**v)).map(|(pos, _)| pos).collect()
}

/// Likelihood-ratio statistic for `a _||_ b | c` on the `a, b, c` margin:
/// `2 sum n_abc log(n_abc n_c / (n_ac n_bc))`, `df = (2^|a| - 1)(2^|b| - 1) 2^|c|`.
pub fn lr_test_between(counts: &CountTable, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("both tested sets must be non-empty".into()));
    }
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::InvalidInput("tested sets must be disjoint".into()));
    }
    let u = a.union(b).union(c);
    if !u.is_subset(NodeSet::full(counts.d())) {
        return Err(Error::DimensionMismatch(format!("sets exceed {} variables", counts.d())));
    }
    let n = counts.marginal(u);
    let (la, lb, lc) = (local(a, u), local(b, u), local(c, u));
    let nac = marginal_vec(&n, la.union(lc));
    let nbc = marginal_vec(&n, lb.union(lc));
    let nc = marginal_vec(&n, lc);
    if nc.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::ZeroMargin { margin: c.to_string() });
    }
    let mut stat = 0.0;
    for (k, &x) in n.iter().enumerate() {
        if x > 0.0 {
            let ac = nac[crate::bintab::compress(k, la.union(lc))];
            let bc = nbc[crate::bintab::compress(k, lb.union(lc))];
            stat += x * (x * nc[crate::bintab::compress(k, lc)] / (ac * bc)).ln();
        }
    }
    let df = (((1usize << a.len()) - 1) * ((1usize << b.len()) - 1)) << c.len();
    Ok(TestResult::new(TestKind::BetweenPrimes, vec![a, b, c], 2.0 * stat, df))
}

/// Deviance of the general Ising model with the given edges on the margin
/// of `prime`. Edges use the global node indices.
pub fn lr_test_within(counts: &CountTable, prime: NodeSet, edges: &[(usize, usize)], opts: IpfOptions) -> Result<TestResult> {
    let nodes = prime.to_vec();
    let pos = |v: usize| nodes.iter().position(|&x| x == v).ok_or_else(|| Error::InvalidInput(format!("edge node {} outside {}", v + 1, prime)));
    let local_edges = edges.iter().map(|&(i, j)| Ok((pos(i)?, pos(j)?))).collect::<Result<Vec<_>>>()?;
    if !prime.is_subset(NodeSet::full(counts.d())) {
        return Err(Error::DimensionMismatch(format!("{} exceeds {} variables", prime, counts.d())));
    }
    let margin = CountTable::new(counts.marginal(prime))?;
    let g = Graph::new(nodes.len(), &local_edges)?;
    let fit = ipf_fit(&margin, &g, Model::General, opts)?;
    Ok(TestResult::new(TestKind::WithinPrime, vec![prime], fit.chi2, fit.df))
}

/// Decomposition of the goodness-of-fit deviance of the general Ising model
/// on a decomposable-by-primes graph: one conditional independence test per
/// eliminated outer set (in scheme order), then one within-prime test per
/// prime with more than two nodes.
pub fn decomposed_tests(counts: &CountTable, g: &Graph, scheme: &[NodeSet], opts: IpfOptions) -> Result<Vec<TestResult>> {
    let dec = prime_decomposition(g)?;
    let mut remaining = g.nodes();
    let mut out = Vec::new();
    for &outer in scheme {
        let prime = dec
            .primes
            .iter()
            .copied()
            .find(|p| outer.is_subset(*p) && p.is_subset(remaining))
            .ok_or_else(|| Error::InvalidScheme(format!("{outer} is not an outer set")))?;
        let sep = prime.difference(outer);
        let rest = remaining.difference(prime);
        if !rest.is_empty() {
            out.push(lr_test_between(counts, outer, rest, sep)?);
        }
        remaining = remaining.difference(outer);
    }
    for &prime in &dec.primes {
        if prime.len() > 2 {
            let edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|&(i, j)| prime.contains(i) && prime.contains(j)).collect();
            out.push(lr_test_within(counts, prime, &edges, opts)?);
        }
    }
    Ok(out)
}
