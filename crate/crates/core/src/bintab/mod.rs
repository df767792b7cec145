//! Binary contingency tables and their interaction parametrizations.
//!
//! Cell `k` (0-based) has variable `s` (0-based) at level +1 iff bit `s` of
//! `k` is set, so the first variable changes fastest. The transforms use the
//! Kronecker powers of `[[1, 1], [1, -1]]`: `lambda = H log(p) / 2^d` and
//! `xi = H p`, with coefficient `k` belonging to the subset of set bits of `k`.

mod hadamard;
mod measures;

pub use hadamard::{fwht, hadamard, MAX_DENSE, MAX_VARS};
pub use measures::{dependence_measures_2x2, tau_parametrize, tri_pi_from_rho, Measures2x2};

use crate::error::{Error, Result};
use crate::set::NodeSet;
use hadamard::check_vars;
use nalgebra::DMatrix;

/// Level of variable `s` in cell `k`: +1 or -1.
#[inline]
pub fn level(k: usize, s: usize) -> f64 {
    if k >> s & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Packs the bits of `k` selected by `mask` into the low bits, in order.
#[inline]
pub fn compress(k: usize, mask: NodeSet) -> usize {
    mask.iter().enumerate().fold(0, |acc, (pos, s)| acc | ((k >> s & 1) << pos))
}

fn log2_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!("table length {len} is not 2^d with d >= 1")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Probability table over `d` binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    d: usize,
    p: Vec<f64>,
}

impl ProbTable {
    /// Validates non-negativity and unit sum (within 1e-12).
    pub fn new(p: Vec<f64>) -> Result<ProbTable> {
        let d = log2_len(p.len())?;
        check_vars(d)?;
        if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("probabilities must be finite and non-negative".into()));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("probabilities sum to {s}, not 1")));
        }
        Ok(ProbTable { d, p })
    }

    /// Normalizes non-negative weights with a positive total.
    pub fn from_weights(w: &[f64]) -> Result<ProbTable> {
        let s: f64 = w.iter().sum();
        if !(s > 0.0) || !s.is_finite() || w.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidInput("weights must be non-negative with a positive total".into()));
        }
        let d = log2_len(w.len())?;
        check_vars(d)?;
        Ok(ProbTable { d, p: w.iter().map(|x| x / s).collect() })
    }

    /// Completes the half table at level -1 of the last variable by
    /// `p(-w) = p(w)`, then normalizes.
    pub fn palindromic_completion(half: &[f64]) -> Result<ProbTable> {
        let mut full = half.to_vec();
        full.extend(half.iter().rev());
        ProbTable::from_weights(&full)
    }

    pub fn uniform(d: usize) -> Result<ProbTable> {
        check_vars(d)?;
        let n = 1usize << d;
        Ok(ProbTable { d, p: vec![1.0 / n as f64; n] })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn probs(&self) -> &[f64] {
        &self.p
    }
    pub fn len(&self) -> usize {
        self.p.len()
    }
    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Table of counts; fractional counts are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    d: usize,
    n: Vec<f64>,
}

impl CountTable {
    pub fn new(n: Vec<f64>) -> Result<CountTable> {
        let d = log2_len(n.len())?;
        check_vars(d)?;
        if n.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("counts must be finite and non-negative".into()));
        }
        if !(n.iter().sum::<f64>() > 0.0) {
            return Err(Error::InvalidInput("total count must be positive".into()));
        }
        Ok(CountTable { d, n })
    }

    /// Expected counts `total * p`.
    pub fn from_probs(p: &ProbTable, total: f64) -> Result<CountTable> {
        CountTable::new(p.probs().iter().map(|x| x * total).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn counts(&self) -> &[f64] {
        &self.n
    }
    pub fn total(&self) -> f64 {
        self.n.iter().sum()
    }
    pub fn to_probs(&self) -> ProbTable {
        let t = self.total();
        ProbTable { d: self.d, p: self.n.iter().map(|x| x / t).collect() }
    }

    /// Marginal counts over `keep`, ordered like a table on those variables.
    pub fn marginal(&self, keep: NodeSet) -> Vec<f64> {
        marginal_vec(&self.n, keep)
    }

    /// Percentage of observations at level +1 for each variable.
    pub fn level_one_percent(&self) -> Vec<f64> {
        let t = self.total();
        (0..self.d)
            .map(|s| 100.0 * self.n.iter().enumerate().filter(|(k, _)| k >> s & 1 == 1).map(|(_, x)| x).sum::<f64>() / t)
            .collect()
    }
}

pub(crate) fn marginal_vec(v: &[f64], keep: NodeSet) -> Vec<f64> {
    let mut out = vec![0.0; 1 << keep.len()];
    for (k, x) in v.iter().enumerate() {
        out[compress(k, keep)] += x;
    }
    out
}

/// Which parametrization an [`InteractionSet`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Lambda,
    Xi,
    Tau,
}

/// Coefficients indexed by subsets of the variables; entry `k` belongs to the
/// subset of set bits of `k`. Tau sets only carry pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSet {
    pub d: usize,
    pub kind: InteractionKind,
    pub values: Vec<f64>,
}

impl InteractionSet {
    pub fn zeros(d: usize, kind: InteractionKind) -> InteractionSet {
        InteractionSet { d, kind, values: vec![0.0; 1 << d] }
    }

    pub fn get(&self, s: NodeSet) -> f64 {
        self.values[s.0 as usize]
    }

    pub fn set(&mut self, s: NodeSet, v: f64) {
        self.values[s.0 as usize] = v;
    }

    /// Pair coefficient for 0-based variables `i`, `j`.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.get(NodeSet::from_nodes([i, j]))
    }

    /// Builds a tau set from 0-based pairs.
    pub fn taus(d: usize, pairs: &[((usize, usize), f64)]) -> Result<InteractionSet> {
        let mut t = InteractionSet::zeros(d, InteractionKind::Tau);
        for &((i, j), v) in pairs {
            if i >= d || j >= d || i == j {
                return Err(Error::InvalidInput(format!("bad pair ({}, {})", i + 1, j + 1)));
            }
            if !(v.abs() < 1.0) {
                return Err(Error::Infeasible(format!("|tau_{}{}| = {} is not below 1", i + 1, j + 1, v.abs())));
            }
            t.set(NodeSet::from_nodes([i, j]), v);
        }
        Ok(t)
    }

    /// Subsets with |value| above `tol`, ordered by size then lexicographically.
    pub fn nonzero(&self, tol: f64) -> Vec<(NodeSet, f64)> {
        let mut out: Vec<(NodeSet, f64)> = (0..self.values.len())
            .filter(|&k| self.values[k].abs() > tol)
            .map(|k| (NodeSet(k as u64), self.values[k]))
            .collect();
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        out
    }
}

/// Log-linear interactions `lambda = H log(p) / 2^d`.
pub fn lambda_of(p: &ProbTable) -> Result<InteractionSet> {
    if let Some(cell) = p.p.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::ZeroCell { cell });
    }
    Ok(lambda_of_positive(p.d, &p.p))
}

pub(crate) fn lambda_of_positive(d: usize, v: &[f64]) -> InteractionSet {
    let mut w: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    fwht(&mut w);
    let scale = (1usize << d) as f64;
    InteractionSet { d, kind: InteractionKind::Lambda, values: w.into_iter().map(|x| x / scale).collect() }
}

/// Log-linear interactions of expected counts (the intercept on count scale).
pub fn lambda_of_counts(n: &CountTable) -> Result<InteractionSet> {
    if let Some(cell) = n.n.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::ZeroCell { cell });
    }
    Ok(lambda_of_positive(n.d, &n.n))
}

/// Inverse of [`lambda_of`]: `p = exp(H lambda)`, renormalized.
pub fn pi_of_lambda(l: &InteractionSet) -> Result<ProbTable> {
    if l.kind != InteractionKind::Lambda {
        return Err(Error::InvalidInput("expected lambda coefficients".into()));
    }
    check_vars(l.d)?;
    let mut w = l.values.clone();
    fwht(&mut w);
    let m = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|x| (x - m).exp()).collect();
    ProbTable::from_weights(&e)
}

/// Linear interactions `xi = H p`.
pub fn xi_of(p: &ProbTable) -> InteractionSet {
    let mut w = p.p.clone();
    fwht(&mut w);
    InteractionSet { d: p.d, kind: InteractionKind::Xi, values: w }
}

/// `max |p(w) - p(-w)| <= tol`.
pub fn is_palindromic(p: &ProbTable, tol: f64) -> bool {
    let n = p.p.len();
    (0..n / 2).all(|k| (p.p[k] - p.p[n - 1 - k]).abs() <= tol)
}

/// General Ising: every interaction of three or more variables within `tol`.
pub fn is_ising(p: &ProbTable, tol: f64) -> Result<bool> {
    let l = lambda_of(p)?;
    Ok((0..l.values.len()).filter(|k| k.count_ones() >= 3).all(|k| l.values[k].abs() <= tol))
}

/// Palindromic Ising: general Ising with vanishing main effects.
pub fn is_palindromic_ising(p: &ProbTable, tol: f64) -> Result<bool> {
    let l = lambda_of(p)?;
    Ok((1..l.values.len()).filter(|k| k.count_ones() != 2).all(|k| l.values[k].abs() <= tol))
}

/// Marginal table over `keep` (non-empty), variables in increasing order.
pub fn marginalize(p: &ProbTable, keep: NodeSet) -> Result<ProbTable> {
    if keep.is_empty() || !keep.is_subset(NodeSet::full(p.d)) {
        return Err(Error::InvalidInput(format!("cannot keep {keep} of {} variables", p.d)));
    }
    Ok(ProbTable { d: keep.len(), p: marginal_vec(&p.p, keep) })
}

/// Conditional table of the unfixed variables given `fixed` levels
/// (0-based variable, level +1 or -1).
pub fn condition(p: &ProbTable, fixed: &[(usize, i8)]) -> Result<ProbTable> {
    let mut fixed_set = NodeSet::EMPTY;
    let mut want = 0usize;
    for &(s, lv) in fixed {
        if s >= p.d || fixed_set.contains(s) || (lv != 1 && lv != -1) {
            return Err(Error::InvalidInput(format!("bad conditioning ({}, {lv})", s + 1)));
        }
        fixed_set.insert(s);
        if lv == 1 {
            want |= 1 << s;
        }
    }
    let free = NodeSet::full(p.d).difference(fixed_set);
    if free.is_empty() {
        return Err(Error::InvalidInput("no variables left after conditioning".into()));
    }
    let mut out = vec![0.0; 1 << free.len()];
    let fmask = fixed_set.0 as usize;
    for (k, &x) in p.p.iter().enumerate() {
        if k & fmask == want {
            out[compress(k, free)] += x;
        }
    }
    let s: f64 = out.iter().sum();
    if !(s > 0.0) {
        return Err(Error::ZeroProbabilityEvent);
    }
    Ok(ProbTable { d: free.len(), p: out.into_iter().map(|x| x / s).collect() })
}

/// Means and correlation matrix of the +-1 coded variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub mu: Vec<f64>,
    pub rho: DMatrix<f64>,
}

/// Means and correlations; errors on a degenerate margin.
pub fn moments(p: &ProbTable) -> Result<MomentSet> {
    let d = p.d;
    let xi = xi_of(p);
    // with +1 at set bits, E(A_s) = -xi_s and E(A_i A_j) = xi_ij
    let mu: Vec<f64> = (0..d).map(|s| -xi.values[1 << s]).collect();
    if let Some(s) = mu.iter().position(|m| 1.0 - m * m <= 1e-15) {
        return Err(Error::Infeasible(format!("variable {} has a degenerate margin", s + 1)));
    }
    let mut rho = DMatrix::identity(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let e = xi.values[(1 << i) | (1 << j)];
            let r = (e - mu[i] * mu[j]) / ((1.0 - mu[i] * mu[i]) * (1.0 - mu[j] * mu[j])).sqrt();
            rho[(i, j)] = r;
            rho[(j, i)] = r;
        }
    }
    Ok(MomentSet { mu, rho })
}
