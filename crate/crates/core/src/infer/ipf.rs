use crate::bintab::{compress, fwht, lambda_of_positive, marginal_vec, InteractionSet};
use crate::error::{Error, Result};
use crate::set::NodeSet;

/// Convergence settings for iterative proportional fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpfOptions {
    /// Largest absolute margin discrepancy (probability scale) at convergence.
    pub tol: f64,
    /// Cap on full sweeps over the margins.
    pub max_iter: usize,
}

impl Default for IpfOptions {
    fn default() -> Self {
        IpfOptions { tol: 1e-10, max_iter: 10_000 }
    }
}

/// A margin to be matched: variables and target probabilities in table order.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub vars: NodeSet,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpfOutcome {
    pub probs: Vec<f64>,
    /// Log-linear terms tracked through the scaling steps.
    pub lambda: InteractionSet,
    /// Full sweeps performed.
    pub iterations: usize,
    /// Largest absolute margin discrepancy after the last sweep.
    pub discrepancy: f64,
    /// Deviance against `observed` after each sweep, when supplied.
    pub deviance_trace: Vec<f64>,
}

pub(crate) fn check_margin(m: &Margin) -> Result<()> {
    if m.target.len() != 1 << m.vars.len() {
        return Err(Error::DimensionMismatch(format!("margin {} has {} cells", m.vars, m.target.len())));
    }
    if m.target.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::ZeroMargin { margin: m.vars.to_string() });
    }
    Ok(())
}

/// Deviance `2 sum n log(n / (N p))` over cells with `n > 0`.
pub fn deviance(observed: &[f64], probs: &[f64]) -> f64 {
    let total: f64 = observed.iter().sum();
    2.0 * observed
        .iter()
        .zip(probs)
        .filter(|(n, _)| **n > 0.0)
        .map(|(n, p)| n * (n / (total * p)).ln())
        .sum::<f64>()
}

/// Scales `start` (a positive probability vector over `d` variables) to
/// match every margin in turn until all discrepancies fall below `tol`.
/// Each scaling step adds `2^{-|S|} H_S log(r)` to the tracked log-linear
/// terms of subsets of the margin's variables `S`.
pub fn ipf(d: usize, margins: &[Margin], start: &[f64], opts: IpfOptions, observed: Option<&[f64]>) -> Result<IpfOutcome> {
    if start.len() != 1 << d {
        return Err(Error::DimensionMismatch("start table has the wrong length".into()));
    }
    for m in margins {
        check_margin(m)?;
        if !m.vars.is_subset(NodeSet::full(d)) {
            return Err(Error::DimensionMismatch(format!("margin {} outside {} variables", m.vars, d)));
        }
    }
    let mut p = start.to_vec();
    let mut lambda = lambda_of_positive(d, &p);
    let mut trace = Vec::new();
    let discrepancy_of = |p: &[f64]| {
        margins
            .iter()
            .map(|m| {
                let cur = marginal_vec(p, m.vars);
                cur.iter().zip(&m.target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };
    let mut disc = discrepancy_of(&p);
    let mut iterations = 0;
    while disc >= opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NonConvergence { iterations, discrepancy: disc });
        }
        for m in margins {
            let cur = marginal_vec(&p, m.vars);
            let ratio: Vec<f64> = m.target.iter().zip(&cur).map(|(t, c)| t / c).collect();
            for (k, x) in p.iter_mut().enumerate() {
                *x *= ratio[compress(k, m.vars)];
            }
            let mut logr: Vec<f64> = ratio.iter().map(|r| r.ln()).collect();
            fwht(&mut logr);
            let local = m.vars.to_vec();
            let scale = (1usize << local.len()) as f64;
            for (u, v) in logr.iter().enumerate() {
                let global: usize = local.iter().enumerate().filter(|(pos, _)| u >> pos & 1 == 1).map(|(_, &s)| 1 << s).sum();
                lambda.values[global] += v / scale;
            }
        }
        iterations += 1;
        disc = discrepancy_of(&p);
        if let Some(obs) = observed {
            trace.push(deviance(obs, &p));
        }
    }
    Ok(IpfOutcome { probs: p, lambda, iterations, discrepancy: disc, deviance_trace: trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bintab::{lambda_of, ProbTable};

    #[test]
    fn matches_margins_and_tracks_lambda() {
        let obs = [10.0, 20.0, 30.0, 5.0, 8.0, 12.0, 7.0, 9.0];
        let total: f64 = obs.iter().sum();
        let margins: Vec<Margin> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| {
                let vars = NodeSet::from_nodes([i, j]);
                Margin { vars, target: marginal_vec(&obs, vars).iter().map(|x| x / total).collect() }
            })
            .collect();
        let out = ipf(3, &margins, &[0.125; 8], IpfOptions::default(), Some(&obs)).unwrap();
        assert!(out.discrepancy < 1e-10);
        let direct = lambda_of(&ProbTable::from_weights(&out.probs).unwrap()).unwrap();
        for (a, b) in direct.values.iter().zip(&out.lambda.values) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(direct.values[7].abs() < 1e-8);
        assert!(out.deviance_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn zero_margin_rejected() {
        let m = Margin { vars: NodeSet::singleton(0), target: vec![1.0, 0.0] };
        assert!(matches!(ipf(1, &[m], &[0.5, 0.5], IpfOptions::default(), None), Err(Error::ZeroMargin { .. })));
    }

    #[test]
    fn iteration_cap() {
        let obs = [10.0, 20.0, 30.0, 5.0, 8.0, 12.0, 7.0, 9.0];
        let margins: Vec<Margin> = [(0, 1), (1, 2), (0, 2)]
            .iter()
            .map(|&(i, j)| {
                let vars = NodeSet::from_nodes([i, j]);
                Margin { vars, target: marginal_vec(&obs, vars).iter().map(|x| x / 101.0).collect() }
            })
            .collect();
        let opts = IpfOptions { tol: 1e-14, max_iter: 1 };
        assert!(matches!(ipf(3, &margins, &[0.125; 8], opts, None), Err(Error::NonConvergence { .. })));
    }
}
