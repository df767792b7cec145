//! Linear relations among correlations: partial inversion, concentrations,
//! partial correlations, regression coefficients, induced correlations in
//! cycles and the block-triangular decomposition of a concentration matrix.

mod cycle;

pub use cycle::{beta_from_tau, cycle_edge_corr, induced_cycle_corr, solve_4cycle, DEFAULT_WINDOW};

use crate::error::{Error, Result};
use crate::set::NodeSet;
use nalgebra::DMatrix;

/// Largest accepted condition number for symmetric positive definite input.
pub const MAX_CONDITION: f64 = 1e12;

pub(crate) fn sub(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

/// Checks symmetry, positive definiteness and the condition number.
pub fn check_spd(m: &DMatrix<f64>) -> Result<()> {
    let n = check_square(m)?;
    let scale = m.abs().max().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::InvalidInput("matrix is not symmetric".into()));
            }
        }
    }
    let ev = m.clone().symmetric_eigenvalues();
    let lo = ev.min();
    let hi = ev.max();
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    if hi / lo > MAX_CONDITION {
        return Err(Error::IllConditioned(hi / lo));
    }
    Ok(())
}

/// Inverse of a symmetric positive definite matrix, after [`check_spd`].
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_spd(m)?;
    let inv = m.clone().cholesky().ok_or(Error::NotPositiveDefinite)?.inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Partial inversion `inv_a M`: for each pivot `k` in `a`, with `s = m_kk`,
/// row `k` becomes `-m_k. / s`, column `k` becomes `m_.k / s`, the pivot
/// `1 / s`, and the rest `m_ij - m_ik m_kj / s`. Applying it twice with the
/// same `a` restores `M`; with `a` the full index set it gives `M^{-1}`.
pub fn partial_invert(m: &DMatrix<f64>, a: NodeSet) -> Result<DMatrix<f64>> {
    let n = check_square(m)?;
    if let Some(bad) = a.iter().find(|&k| k >= n) {
        return Err(Error::NodeOutOfRange { node: bad + 1, d: n });
    }
    let scale = m.abs().max().max(f64::MIN_POSITIVE);
    let mut out = m.clone();
    for k in a.iter() {
        let s = out[(k, k)];
        if s.abs() <= 1e-14 * scale {
            return Err(Error::SingularPivot(k + 1));
        }
        let prev = out.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = match (i == k, j == k) {
                    (true, true) => 1.0 / s,
                    (true, false) => -prev[(k, j)] / s,
                    (false, true) => prev[(i, k)] / s,
                    (false, false) => prev[(i, j)] - prev[(i, k)] * prev[(k, j)] / s,
                };
            }
        }
    }
    Ok(out)
}

/// Correlation matrix with its concentration matrix and the overall
/// partial-correlation matrix `theta` (unit diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrStack {
    pub sigma: DMatrix<f64>,
    pub conc: DMatrix<f64>,
    pub theta: DMatrix<f64>,
}

/// Computes `Sigma^{-1}` and `theta_ij = -s^{ij} / sqrt(s^{ii} s^{jj})`.
pub fn concentration_and_theta(sigma: &DMatrix<f64>) -> Result<CorrStack> {
    let conc = spd_inverse(sigma)?;
    let theta = standardize_negated(&conc);
    Ok(CorrStack { sigma: sigma.clone(), conc, theta })
}

/// Partial correlations of all pairs given all remaining variables.
pub fn partial_correlations(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(concentration_and_theta(sigma)?.theta)
}

fn standardize_negated(conc: &DMatrix<f64>) -> DMatrix<f64> {
    let n = conc.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            -conc[(i, j)] / (conc[(i, i)] * conc[(j, j)]).sqrt()
        }
    })
}

/// Scales a covariance matrix to unit diagonal.
pub fn standardize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)] / (m[(i, i)] * m[(j, j)]).sqrt())
}

/// Induced correlations `Sigma* = std((2I - theta)^{-1})`.
pub fn theta_to_corr(theta: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = check_square(theta)?;
    let m = DMatrix::<f64>::identity(n, n) * 2.0 - theta;
    Ok(standardize(&spd_inverse(&m)?))
}

/// Linear regression coefficients `Pi_{a|c} = Sigma_ac Sigma_cc^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionCoefs {
    pub responses: Vec<usize>,
    pub regressors: Vec<usize>,
    pub pi: DMatrix<f64>,
}

impl RegressionCoefs {
    /// Coefficient of regressor `j` for response `i` (0-based variables).
    pub fn coef(&self, i: usize, j: usize) -> Option<f64> {
        let r = self.responses.iter().position(|&x| x == i)?;
        let c = self.regressors.iter().position(|&x| x == j)?;
        Some(self.pi[(r, c)])
    }
}

/// Regression of `a` on `c` computed through partial inversion on `c`.
pub fn regression(sigma: &DMatrix<f64>, a: NodeSet, c: NodeSet) -> Result<RegressionCoefs> {
    let n = check_square(sigma)?;
    if !a.is_disjoint(c) || !a.union(c).is_subset(NodeSet::full(n)) || a.is_empty() {
        return Err(Error::InvalidInput(format!("bad regression sets {a} on {c}")));
    }
    let keep: Vec<usize> = a.union(c).to_vec();
    let s = sub(sigma, &keep, &keep);
    check_spd(&s)?;
    let local_c: NodeSet = keep.iter().enumerate().filter(|(_, v)| c.contains(**v)).map(|(k, _)| k).collect();
    let swept = partial_invert(&s, local_c)?;
    let ra: Vec<usize> = keep.iter().enumerate().filter(|(_, v)| a.contains(**v)).map(|(k, _)| k).collect();
    let rc: Vec<usize> = local_c.to_vec();
    Ok(RegressionCoefs { responses: a.to_vec(), regressors: c.to_vec(), pi: sub(&swept, &ra, &rc) })
}

/// Residual covariance `Sigma_{aa|c}` via partial inversion on `c`.
pub fn residual_cov(sigma: &DMatrix<f64>, a: NodeSet, c: NodeSet) -> Result<DMatrix<f64>> {
    let keep: Vec<usize> = a.union(c).to_vec();
    let s = sub(sigma, &keep, &keep);
    check_spd(&s)?;
    let local_c: NodeSet = keep.iter().enumerate().filter(|(_, v)| c.contains(**v)).map(|(k, _)| k).collect();
    let swept = partial_invert(&s, local_c)?;
    let ra: Vec<usize> = keep.iter().enumerate().filter(|(_, v)| a.contains(**v)).map(|(k, _)| k).collect();
    Ok(sub(&swept, &ra, &ra))
}

/// Induced covariances `Sigma*_ab = Pi_{a|c} Sigma_cb`.
pub fn induced_cov(pi: &RegressionCoefs, sigma: &DMatrix<f64>, b: NodeSet) -> Result<DMatrix<f64>> {
    if pi.pi.ncols() != pi.regressors.len() || pi.regressors.iter().any(|&c| c >= sigma.nrows()) {
        return Err(Error::DimensionMismatch("regressors do not match the covariance matrix".into()));
    }
    let bv = b.to_vec();
    if bv.iter().any(|&x| x >= sigma.nrows()) {
        return Err(Error::DimensionMismatch("b outside the covariance matrix".into()));
    }
    Ok(&pi.pi * sub(sigma, &pi.regressors, &bv))
}

/// Four-factor linear interaction `xi_ijkl = Pi_{i|e} (rho_kl, rho_jl, rho_jk)^T`
/// for response `i` and the other three variables `e = (j, k, l)`, where
/// `pi_row` holds the coefficients of `i` on `j`, `k`, `l`.
pub fn induced_xi4(sigma: &DMatrix<f64>, e: [usize; 3], pi_row: [f64; 3]) -> Result<f64> {
    if e.iter().any(|&x| x >= sigma.nrows()) {
        return Err(Error::DimensionMismatch("index outside the correlation matrix".into()));
    }
    let [j, k, l] = e;
    Ok(pi_row[0] * sigma[(k, l)] + pi_row[1] * sigma[(j, l)] + pi_row[2] * sigma[(j, k)])
}

/// Components of the block-triangular decomposition of a concentration
/// matrix for the partition `(a, b, c)`; `terms` sum to the input.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub phi: [DMatrix<f64>; 3],
    pub terms: [DMatrix<f64>; 3],
}

/// Splits `K = Sigma^{-1}` into `phi_a (K^aa)^{-1} phi_a' + phi_b (K^{bb.a})^{-1} phi_b'
/// + phi_c (K^{cc.ab})^{-1} phi_c'`, where `.a` marks concentrations after
/// marginalising over `a`. Rows and columns keep the input indexing.
pub fn block_decomposition(conc: &DMatrix<f64>, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<BlockDecomposition> {
    let n = check_square(conc)?;
    let all = NodeSet::full(n);
    if a.union(b).union(c) != all || !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::InvalidInput("blocks must partition the index set".into()));
    }
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(Error::InvalidInput("blocks must be non-empty".into()));
    }
    check_spd(conc)?;
    // concentration of the variables in `keep` after marginalising over the rest
    let marg_conc = |keep: NodeSet| -> Result<DMatrix<f64>> {
        let drop = all.difference(keep);
        // partial inversion on the dropped block leaves the Schur complement on `keep`
        let swept = partial_invert(conc, drop)?;
        let mut out = DMatrix::zeros(n, n);
        for i in keep.iter() {
            for j in keep.iter() {
                out[(i, j)] = swept[(i, j)];
            }
        }
        Ok(out)
    };
    let k_a = conc.clone();
    let k_bc = marg_conc(b.union(c))?;
    let k_c = marg_conc(c)?;
    let mut phis = Vec::new();
    let mut terms = Vec::new();
    for (block, k) in [(a, &k_a), (b, &k_bc), (c, &k_c)] {
        let cols = block.to_vec();
        let rows: Vec<usize> = (0..n).collect();
        let phi = sub(k, &rows, &cols);
        let pivot = sub(k, &cols, &cols);
        let term = &phi * spd_inverse(&pivot)? * phi.transpose();
        phis.push(phi);
        terms.push(term);
    }
    let [p0, p1, p2]: [DMatrix<f64>; 3] = phis.try_into().expect("three blocks");
    let [t0, t1, t2]: [DMatrix<f64>; 3] = terms.try_into().expect("three blocks");
    Ok(BlockDecomposition { phi: [p0, p1, p2], terms: [t0, t1, t2] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd3() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.3, 0.5, 1.5, -0.2, 0.3, -0.2, 1.0])
    }

    #[test]
    fn partial_inversion_basics() {
        let one = DMatrix::from_element(1, 1, 4.0);
        assert_eq!(partial_invert(&one, NodeSet::singleton(0)).unwrap()[(0, 0)], 0.25);
        let m = spd3();
        let step = partial_invert(&partial_invert(&m, NodeSet::from_nodes([0, 1])).unwrap(), NodeSet::singleton(2)).unwrap();
        let inv = m.clone().try_inverse().unwrap();
        assert!((step - &inv).abs().max() < 1e-12);
        let back = partial_invert(&partial_invert(&m, NodeSet::singleton(1)).unwrap(), NodeSet::singleton(1)).unwrap();
        assert!((back - m).abs().max() < 1e-14);
    }

    #[test]
    fn singular_pivot() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(partial_invert(&m, NodeSet::singleton(0)), Err(Error::SingularPivot(1)));
    }

    #[test]
    fn identity_theta() {
        let s = concentration_and_theta(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(s.theta, DMatrix::identity(3, 3));
        assert_eq!(theta_to_corr(&DMatrix::identity(3, 3)).unwrap(), DMatrix::identity(3, 3));
    }

    #[test]
    fn non_pd_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(concentration_and_theta(&m), Err(Error::NotPositiveDefinite));
        let ill = DMatrix::from_row_slice(2, 2, &[1.0, 1.0 - 1e-14, 1.0 - 1e-14, 1.0]);
        assert!(matches!(concentration_and_theta(&ill), Err(Error::IllConditioned(_)) | Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn regression_matches_normal_equations() {
        let m = spd3();
        let r = regression(&m, NodeSet::singleton(0), NodeSet::from_nodes([1, 2])).unwrap();
        let scc = sub(&m, &[1, 2], &[1, 2]);
        let sac = sub(&m, &[0], &[1, 2]);
        let direct = sac * scc.try_inverse().unwrap();
        assert!((r.pi - direct).abs().max() < 1e-12);
    }

    #[test]
    fn block_terms_reconstruct() {
        let k = spd_inverse(&spd3()).unwrap();
        let bd = block_decomposition(&k, NodeSet::singleton(0), NodeSet::singleton(1), NodeSet::singleton(2)).unwrap();
        let sum = &bd.terms[0] + &bd.terms[1] + &bd.terms[2];
        assert!((sum - k).abs().max() < 1e-12);
        assert_eq!(bd.phi[1][(0, 0)], 0.0);
        assert_eq!(bd.phi[2][(1, 0)], 0.0);
    }
}
