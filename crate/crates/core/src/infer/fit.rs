use super::ipf::{deviance, ipf, IpfOptions, Margin};
use super::symmetrize::symmetrized_margins;
use crate::bintab::{compress, lambda_of_positive, level, marginal_vec, pi_of_lambda, tri_pi_from_rho, CountTable, InteractionSet, ProbTable};
use crate::error::{Error, Result};
use crate::graph::{classify, prime_decomposition, Graph};
use crate::lincalc::{solve_4cycle, DEFAULT_WINDOW};
use crate::set::NodeSet;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Ising model family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Free intercept, main effects and pair terms on the edges.
    General,
    /// Free intercept and pair terms on the edges; main effects fixed at
    /// zero and the two-way margins replaced by their symmetrized versions.
    Palindromic,
}

/// How standard errors of fitted log-linear terms are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TstatMethod {
    /// Inverse Fisher information of the fitted log-linear model.
    #[default]
    Fisher,
    /// Delta method for the saturated model, `sum_k c_k^2 / n_k` with
    /// `c_k = +-2^{-d}`, evaluated at the fitted counts.
    SaturatedDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub graph: Graph,
    pub model: Model,
    pub fitted: ProbTable,
    /// Sample size the expected counts are scaled to.
    pub n: f64,
    /// Log-linear terms of the expected counts `n p`.
    pub lambda: InteractionSet,
    /// Log-linear terms of the fitted probabilities.
    pub lambda_prob: InteractionSet,
    /// Unconstrained terms, intercept first, then in canonical order.
    pub free_terms: Vec<NodeSet>,
    pub chi2: f64,
    pub df: usize,
    /// t-statistics of the free terms other than the intercept.
    pub tstats: Vec<(NodeSet, f64)>,
    pub iterations: usize,
    pub discrepancy: f64,
    pub tolerance: f64,
}

impl FitReport {
    pub fn expected(&self) -> Vec<f64> {
        self.fitted.probs().iter().map(|p| p * self.n).collect()
    }
}

pub(crate) fn free_terms(g: &Graph, model: Model) -> Vec<NodeSet> {
    let mut terms = vec![NodeSet::EMPTY];
    if model == Model::General {
        terms.extend((0..g.d()).map(NodeSet::singleton));
    }
    terms.extend(g.edges().into_iter().map(|(i, j)| NodeSet::from_nodes([i, j])));
    terms
}

/// Margins the model must reproduce, in fixed order: edge pairs in
/// lexicographic order, then single variables not covered by an edge.
pub(crate) fn sufficient_margins(counts: &CountTable, g: &Graph, model: Model) -> Result<Vec<Margin>> {
    let edges = g.edges();
    match model {
        Model::Palindromic => symmetrized_margins(counts, &edges),
        Model::General => {
            let total = counts.total();
            let mut sets: Vec<NodeSet> = edges.iter().map(|&(i, j)| NodeSet::from_nodes([i, j])).collect();
            sets.extend((0..g.d()).filter(|&v| g.neighbors(v).is_empty()).map(NodeSet::singleton));
            sets.into_iter()
                .map(|vars| {
                    let target: Vec<f64> = counts.marginal(vars).iter().map(|x| x / total).collect();
                    if target.iter().any(|&x| !(x > 0.0)) {
                        return Err(Error::ZeroMargin { margin: vars.to_string() });
                    }
                    Ok(Margin { vars, target })
                })
                .collect()
        }
    }
}

fn check_counts(counts: &CountTable, g: &Graph) -> Result<()> {
    if counts.d() != g.d() {
        return Err(Error::DimensionMismatch(format!("table on {} variables, graph on {} nodes", counts.d(), g.d())));
    }
    if !(counts.total() > 0.0) {
        return Err(Error::InvalidInput("total count must be positive".into()));
    }
    Ok(())
}

fn max_discrepancy(p: &[f64], margins: &[Margin]) -> f64 {
    margins
        .iter()
        .map(|m| marginal_vec(p, m.vars).iter().zip(&m.target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    counts: &CountTable,
    g: &Graph,
    model: Model,
    probs: Vec<f64>,
    lambda_prob: InteractionSet,
    iterations: usize,
    discrepancy: f64,
    tol: f64,
) -> Result<FitReport> {
    let n = counts.total();
    let mut lambda = lambda_prob.clone();
    lambda.values[0] += n.ln();
    let free = free_terms(g, model);
    let df = (1usize << g.d()) - free.len();
    let chi2 = deviance(counts.counts(), &probs);
    let mut report = FitReport {
        graph: g.clone(),
        model,
        fitted: ProbTable::new(probs)?,
        n,
        lambda,
        lambda_prob,
        free_terms: free,
        chi2,
        df,
        tstats: Vec::new(),
        iterations,
        discrepancy,
        tolerance: tol,
    };
    report.tstats = lambda_tstats(&report, TstatMethod::Fisher)?;
    Ok(report)
}

/// Maximum-likelihood fit of the Ising model with pair terms on the edges
/// of `g`, by IPF over the sufficient margins starting from uniform.
pub fn ipf_fit(counts: &CountTable, g: &Graph, model: Model, opts: IpfOptions) -> Result<FitReport> {
    check_counts(counts, g)?;
    let d = g.d();
    let margins = sufficient_margins(counts, g, model)?;
    let start = vec![1.0 / (1u64 << d) as f64; 1 << d];
    let out = ipf(d, &margins, &start, opts, Some(counts.counts()))?;
    assemble(counts, g, model, out.probs, out.lambda, out.iterations, out.discrepancy, opts.tol)
}

/// Fit restricted to one prime; returns local probabilities and IPF sweeps.
fn fit_prime(counts: &CountTable, g: &Graph, prime: NodeSet, model: Model, opts: IpfOptions) -> Result<(Vec<f64>, usize)> {
    let nodes = prime.to_vec();
    let k = nodes.len();
    let local_edges: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|&(i, j)| prime.contains(i) && prime.contains(j))
        .map(|(i, j)| (nodes.iter().position(|&v| v == i).unwrap(), nodes.iter().position(|&v| v == j).unwrap()))
        .collect();
    let local = CountTable::new(counts.marginal(prime))?;
    let lg = Graph::new(k, &local_edges)?;
    let margins = sufficient_margins(&local, &lg, model)?;
    let uniform = vec![1.0 / (1u64 << k) as f64; 1 << k];

    if k == 2 {
        return Ok((margins[0].target.clone(), 0));
    }
    if model == Model::Palindromic {
        let corr = |m: &Margin| 1.0 - 2.0 * (m.target[1] + m.target[2]);
        let r = |a: usize, b: usize| {
            let vars = NodeSet::from_nodes([a.min(b), a.max(b)]);
            margins.iter().find(|m| m.vars == vars).map(corr).unwrap_or(0.0)
        };
        if k == 3 && local_edges.len() == 3 {
            let p = tri_pi_from_rho(r(0, 1), r(0, 2), r(1, 2))?;
            return Ok((p.probs().to_vec(), 0));
        }
        if k == 4 && local_edges.len() == 4 {
            if let Some(start) = seeded_4cycle(&local, &lg, r) {
                let out = ipf(k, &margins, &start, opts, None)?;
                return Ok((out.probs, out.iterations));
            }
        }
    }
    let out = ipf(k, &margins, &uniform, opts, None)?;
    Ok((out.probs, out.iterations))
}

/// Starting table for a palindromic 4-cycle built from the induced
/// correlation of one uncoupled pair, projected onto the model terms.
fn seeded_4cycle(local: &CountTable, lg: &Graph, r: impl Fn(usize, usize) -> f64) -> Option<Vec<f64>> {
    let c = lg.cycle_order(NodeSet::full(4))?;
    // uncoupled pairs (v1, v2) and (v3, v4)
    let (v1, v3, v2, v4) = (c[0], c[1], c[2], c[3]);
    let seed = |a: usize, b: usize| {
        let s = symmetrized_margins(local, &[(a.min(b), a.max(b))]).ok()?;
        Some(1.0 - 2.0 * (s[0].target[1] + s[0].target[2]))
    };
    let (r13, r14, r23, r24) = (r(v1, v3), r(v1, v4), r(v2, v3), r(v2, v4));
    let (_, y) = solve_4cycle(r13, r14, r23, r24, seed(v1, v2)?, seed(v3, v4)?, DEFAULT_WINDOW).ok()?;
    let t1 = tri_pi_from_rho(r13, r14, y).ok()?;
    let t2 = tri_pi_from_rho(r23, r24, y).ok()?;
    let cell = |k: usize, order: [usize; 3]| order.iter().enumerate().map(|(pos, &v)| (k >> v & 1) << pos).sum::<usize>();
    let m34 = [(1.0 + y) / 4.0, (1.0 - y) / 4.0, (1.0 - y) / 4.0, (1.0 + y) / 4.0];
    let s34 = NodeSet::from_nodes([v3, v4]);
    let p: Vec<f64> = (0..16)
        .map(|k| t1.probs()[cell(k, [v1, v3, v4])] * t2.probs()[cell(k, [v2, v3, v4])] / m34[compress(k, s34)])
        .collect();
    if p.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    let mut lam = lambda_of_positive(4, &p);
    let allowed: Vec<usize> = std::iter::once(0).chain(lg.edges().into_iter().map(|(i, j)| (1 << i) | (1 << j))).collect();
    for (u, v) in lam.values.iter_mut().enumerate() {
        if !allowed.contains(&u) {
            *v = 0.0;
        }
    }
    pi_of_lambda(&lam).ok().map(|t| t.probs().to_vec())
}

/// Fit of a hollow-tree model prime by prime, combined through
/// `f = prod f_prime / prod f_cutset`.
pub fn fit_hollow_tree(counts: &CountTable, g: &Graph, model: Model, opts: IpfOptions) -> Result<FitReport> {
    check_counts(counts, g)?;
    let class = classify(g)?;
    if !class.is_hollow() {
        return Err(Error::NotHollowTree(format!("graph is {class}")));
    }
    let dec = prime_decomposition(g)?;
    let d = g.d();
    let mut iterations = 0;
    let mut fitted: Vec<(NodeSet, Vec<f64>)> = Vec::with_capacity(dec.primes.len());
    for &prime in &dec.primes {
        let (p, it) = fit_prime(counts, g, prime, model, opts)?;
        iterations += it;
        fitted.push((prime, p));
    }
    let mut probs = vec![1.0; 1 << d];
    for (prime, f) in &fitted {
        for (k, x) in probs.iter_mut().enumerate() {
            *x *= f[compress(k, *prime)];
        }
    }
    for &(p, _, cut) in &dec.links {
        let (prime, f) = &fitted[p];
        let local: NodeSet = prime.to_vec().iter().enumerate().filter(|(_, v)| cut.contains(**v)).map(|(pos, _)| pos).collect();
        let m = marginal_vec(f, local);
        for (k, x) in probs.iter_mut().enumerate() {
            *x /= m[compress(k, cut)];
        }
    }
    let s: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|x| *x /= s);
    if probs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::ZeroProbabilityEvent);
    }
    let margins = sufficient_margins(counts, g, model)?;
    let disc = max_discrepancy(&probs, &margins);
    let lambda_prob = lambda_of_positive(d, &probs);
    assemble(counts, g, model, probs, lambda_prob, iterations, disc, opts.tol)
}

/// t-statistics `lambda_S / se(lambda_S)` for the free terms of a fit,
/// intercept excluded, in the order of `fit.free_terms`.
pub fn lambda_tstats(fit: &FitReport, method: TstatMethod) -> Result<Vec<(NodeSet, f64)>> {
    let mu = fit.expected();
    if let Some(cell) = mu.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::ZeroCell { cell });
    }
    let d = fit.fitted.d();
    let terms = &fit.free_terms;
    let variances: Vec<f64> = match method {
        TstatMethod::SaturatedDelta => {
            let c2 = 1.0 / (1u64 << (2 * d)) as f64;
            let v = c2 * mu.iter().map(|m| 1.0 / m).sum::<f64>();
            vec![v; terms.len()]
        }
        TstatMethod::Fisher => {
            let h = |k: usize, s: NodeSet| s.iter().map(|v| level(k, v)).product::<f64>();
            let m = terms.len();
            let info = DMatrix::from_fn(m, m, |a, b| mu.iter().enumerate().map(|(k, w)| w * h(k, terms[a]) * h(k, terms[b])).sum());
            let cov = info.try_inverse().ok_or(Error::NotPositiveDefinite)?;
            (0..m).map(|a| cov[(a, a)]).collect()
        }
    };
    Ok(terms
        .iter()
        .zip(&variances)
        .filter(|(s, _)| !s.is_empty())
        .map(|(&s, &v)| (s, fit.lambda_prob.get(s) / v.sqrt()))
        .collect())
}

/// `n` times the asymptotic variance of the estimated `lambda_12` of a 2x2
/// table on the log odds-ratio scale: `4 + 4[cosh(2 l12)(cosh(2 l1) +
/// cosh(2 l2)) + cosh(2 l1) cosh(2 l2)]`.
pub fn avar_lambda12(l1: f64, l2: f64, l12: f64) -> f64 {
    let (c1, c2, c12) = ((2.0 * l1).cosh(), (2.0 * l2).cosh(), (2.0 * l12).cosh());
    4.0 + 4.0 * (c12 * (c1 + c2) + c1 * c2)
}
