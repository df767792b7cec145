use super::{level, ProbTable};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::set::NodeSet;

use super::InteractionSet;

/// Dependence measures of a 2x2 table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures2x2 {
    pub odds_ratio: f64,
    pub lambda: f64,
    pub tau: f64,
    /// `P(A1 = 1 | A2 = 1) - P(A1 = 1 | A2 = -1)`.
    pub chance_difference: f64,
    pub correlation: f64,
}

/// Measures for a 2x2 table given in cell order `[a, b, c, d]` =
/// `(-,-), (+,-), (-,+), (+,+)` for `(A1, A2)`; the entries need not sum to one.
pub fn dependence_measures_2x2(t: [f64; 4]) -> Result<Measures2x2> {
    if let Some(cell) = t.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::ZeroCell { cell });
    }
    let s: f64 = t.iter().sum();
    let [a, b, c, d] = t.map(|x| x / s);
    let odds_ratio = a * d / (b * c);
    let lambda = odds_ratio.ln() / 4.0;
    let root = odds_ratio.sqrt();
    let tau = (root - 1.0) / (root + 1.0);
    let chance_difference = d / (c + d) - b / (a + b);
    let correlation = (a * d - b * c) / ((a + b) * (c + d) * (a + c) * (b + d)).sqrt();
    Ok(Measures2x2 { odds_ratio, lambda, tau, chance_difference, correlation })
}

/// Trivariate palindromic table with the given simple correlations.
/// Cells are `alpha, beta, gamma, delta` at level -1 of the third variable
/// and their mirror images at level +1, with
/// `rho12 = 1 - 4(beta + gamma)`, `rho13 = 1 - 4(beta + delta)`,
/// `rho23 = 1 - 4(gamma + delta)`.
pub fn tri_pi_from_rho(r12: f64, r13: f64, r23: f64) -> Result<ProbTable> {
    let alpha = (1.0 + r12 + r13 + r23) / 8.0;
    let beta = (1.0 - r12 - r13 + r23) / 8.0;
    let gamma = (1.0 - r12 + r13 - r23) / 8.0;
    let delta = (1.0 + r12 - r13 - r23) / 8.0;
    let half = [alpha, beta, gamma, delta];
    if half.iter().any(|&x| x < -1e-12 || !x.is_finite()) {
        return Err(Error::Infeasible(format!("correlations ({r12}, {r13}, {r23}) imply a negative cell")));
    }
    let half = half.map(|x| x.max(0.0));
    let p = vec![half[0], half[1], half[2], half[3], half[3], half[2], half[1], half[0]];
    ProbTable::from_weights(&p)
}

/// Product form `Pr(w) ~ prod_{st} (1 + tau_st w_s w_t)` over the edges of `g`.
/// Each factor equals `sqrt(1 - tau^2) exp(atanh(tau) w_s w_t)`, so the
/// resulting log-linear pair terms are `atanh(tau_st)` on any graph.
pub fn tau_parametrize(taus: &InteractionSet, g: &Graph) -> Result<ProbTable> {
    if taus.d != g.d() {
        return Err(Error::DimensionMismatch(format!("{} taus for a graph on {} nodes", taus.d, g.d())));
    }
    let d = g.d();
    for k in 0..taus.values.len() {
        let v = taus.values[k];
        if v == 0.0 {
            continue;
        }
        let s = NodeSet(k as u64);
        let nodes = s.to_vec();
        if nodes.len() != 2 {
            return Err(Error::InvalidInput(format!("tau coefficient on non-pair {s}")));
        }
        if !g.has_edge(nodes[0], nodes[1]) {
            return Err(Error::InvalidInput(format!("tau on missing edge {s}")));
        }
        if !(v.abs() < 1.0) {
            return Err(Error::Infeasible(format!("|tau{s}| >= 1")));
        }
    }
    let edges: Vec<(usize, usize, f64)> = g.edges().into_iter().map(|(i, j)| (i, j, taus.pair(i, j))).collect();
    let w: Vec<f64> = (0..1usize << d)
        .map(|k| edges.iter().map(|&(i, j, t)| 1.0 + t * level(k, i) * level(k, j)).product())
        .collect();
    ProbTable::from_weights(&w)
}
