use crate::bintab::InteractionSet;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Default half-width of the search window around the seeds in [`solve_4cycle`].
pub const DEFAULT_WINDOW: f64 = 0.2;

/// Linear regression coefficients of a node on its two neighbours in a
/// triangle or chordless cycle, from the hypetan interactions of the two
/// edges: `beta_{i|j.rest} = tau_ij (1 - tau_ik^2) / (1 - tau_ij^2 tau_ik^2)`
/// and symmetrically for `k`. Coefficients on non-neighbours are zero.
pub fn beta_from_tau(tau_ij: f64, tau_ik: f64) -> Result<(f64, f64)> {
    if !(tau_ij.abs() < 1.0 && tau_ik.abs() < 1.0) {
        return Err(Error::Infeasible("hypetan interactions must lie in (-1, 1)".into()));
    }
    let c = 1.0 - tau_ij * tau_ij * tau_ik * tau_ik;
    Ok((tau_ij * (1.0 - tau_ik * tau_ik) / c, tau_ik * (1.0 - tau_ij * tau_ij) / c))
}

/// Products of the edge taus along the two arcs of `cycle` joining `k` and `l`.
fn arc_products(cycle: &[usize], taus: &InteractionSet, k: usize, l: usize) -> Result<(f64, f64, usize, usize)> {
    let h = cycle.len();
    if h < 3 {
        return Err(Error::InvalidInput("a cycle needs at least three nodes".into()));
    }
    let pk = cycle.iter().position(|&v| v == k).ok_or_else(|| Error::InvalidInput(format!("node {} not on the cycle", k + 1)))?;
    let pl = cycle.iter().position(|&v| v == l).ok_or_else(|| Error::InvalidInput(format!("node {} not on the cycle", l + 1)))?;
    if pk == pl {
        return Err(Error::InvalidInput("pair needs two distinct nodes".into()));
    }
    let edge = |p: usize| -> Result<f64> {
        let (a, b) = (cycle[p % h], cycle[(p + 1) % h]);
        let t = taus.pair(a, b);
        if !(t.abs() < 1.0) {
            return Err(Error::Infeasible(format!("|tau_{}{}| >= 1", a + 1, b + 1)));
        }
        Ok(t)
    };
    let steps = (pl + h - pk) % h;
    let mut p1 = 1.0;
    for s in 0..steps {
        p1 *= edge(pk + s)?;
    }
    let mut p2 = 1.0;
    for s in 0..h - steps {
        p2 *= edge(pl + s)?;
    }
    Ok((p1, p2, steps, h - steps))
}

/// Marginal correlation induced for an uncoupled pair `(k, l)` of a
/// palindromic Ising cycle by tracing both connecting paths:
/// `(P1 + P2) / (1 + P1 P2)` with `P` the tau products along each path.
pub fn induced_cycle_corr(cycle: &[usize], taus: &InteractionSet, k: usize, l: usize) -> Result<f64> {
    let (p1, p2, n1, n2) = arc_products(cycle, taus, k, l)?;
    if n1 == 1 || n2 == 1 {
        return Err(Error::AdjacentPair(k.min(l) + 1, k.max(l) + 1));
    }
    Ok((p1 + p2) / (1.0 + p1 * p2))
}

/// Marginal correlation of an edge `(k, l)` present in the cycle:
/// `(tau_kl + P) / (1 + prod of all taus)` with `P` the product along the other path.
pub fn cycle_edge_corr(cycle: &[usize], taus: &InteractionSet, k: usize, l: usize) -> Result<f64> {
    let (p1, p2, n1, n2) = arc_products(cycle, taus, k, l)?;
    if n1 != 1 && n2 != 1 {
        return Err(Error::InvalidInput(format!("pair {}-{} is not an edge of the cycle", k + 1, l + 1)));
    }
    Ok((p1 + p2) / (1.0 + p1 * p2))
}

type Poly = Vec<f64>;

fn pmul(a: &[f64], b: &[f64]) -> Poly {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn padd(a: &[f64], b: &[f64]) -> Poly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn pscale(a: &[f64], s: f64) -> Poly {
    a.iter().map(|x| x * s).collect()
}

#[cfg(test)]
fn peval(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Real roots of a polynomial (coefficients in increasing degree) from the
/// eigenvalues of its companion matrix.
fn real_roots(p: &[f64]) -> Vec<f64> {
    let mut p = p.to_vec();
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    while p.len() > 1 && p.last().is_some_and(|c| c.abs() <= 1e-14 * scale) {
        p.pop();
    }
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let comp = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -p[n - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    comp.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect()
}

/// Solves the coupled cubics for the correlations induced on the two
/// uncoupled pairs of a palindromic Ising 4-cycle with edges 13, 14, 23, 24:
/// `x(y^2 - 1) - c1 y + c2 = 0` and `y(x^2 - 1) - c1 x + c3 = 0` with
/// `c1 = r13 r24 + r14 r23`, `c2 = r13 r23 + r14 r24`, `c3 = r13 r14 + r23 r24`.
/// Eliminating `y = (c1 x - c3) / (x^2 - 1)` gives a quintic in `x`; its real
/// roots are polished by Newton steps on the pair of equations, and the one
/// solution within `window` of both seeds is returned.
pub fn solve_4cycle(r13: f64, r14: f64, r23: f64, r24: f64, seed12: f64, seed34: f64, window: f64) -> Result<(f64, f64)> {
    for r in [r13, r14, r23, r24] {
        if !(r.abs() < 1.0) {
            return Err(Error::Infeasible("edge correlations must lie in (-1, 1)".into()));
        }
    }
    if !(window > 0.0) {
        return Err(Error::InvalidInput("window must be positive".into()));
    }
    let c1 = r13 * r24 + r14 * r23;
    let c2 = r13 * r23 + r14 * r24;
    let c3 = r13 * r14 + r23 * r24;
    let f = |x: f64, y: f64| (x * (y * y - 1.0) - c1 * y + c2, y * (x * x - 1.0) - c1 * x + c3);

    // x[(c1 x - c3)^2 - (x^2 - 1)^2] - c1 (c1 x - c3)(x^2 - 1) + c2 (x^2 - 1)^2
    let lin = vec![-c3, c1];
    let q = vec![-1.0, 0.0, 1.0];
    let q2 = pmul(&q, &q);
    let term1 = pmul(&[0.0, 1.0], &padd(&pmul(&lin, &lin), &pscale(&q2, -1.0)));
    let term2 = pscale(&pmul(&lin, &q), -c1);
    let term3 = pscale(&q2, c2);
    let quintic = padd(&padd(&term1, &term2), &term3);

    let mut sols: Vec<(f64, f64)> = Vec::new();
    for x0 in real_roots(&quintic) {
        if !(x0.abs() < 1.0) {
            continue;
        }
        let mut x = x0;
        let mut y = (c1 * x - c3) / (x * x - 1.0);
        for _ in 0..50 {
            let (f1, f2) = f(x, y);
            // Jacobian of (f1, f2)
            let (a, b) = (y * y - 1.0, 2.0 * x * y - c1);
            let (c, d) = (2.0 * x * y - c1, x * x - 1.0);
            let det = a * d - b * c;
            if det.abs() < 1e-300 {
                break;
            }
            let dx = (f1 * d - f2 * b) / det;
            let dy = (a * f2 - c * f1) / det;
            x -= dx;
            y -= dy;
            if dx.abs() + dy.abs() < 1e-15 {
                break;
            }
        }
        let (f1, f2) = f(x, y);
        if f1.abs() + f2.abs() > 1e-9 || !(x.abs() < 1.0 && y.abs() < 1.0) {
            continue;
        }
        if !sols.iter().any(|&(u, v)| (u - x).abs() < 1e-9 && (v - y).abs() < 1e-9) {
            sols.push((x, y));
        }
    }
    let inside: Vec<(f64, f64)> = sols
        .into_iter()
        .filter(|&(x, y)| (x - seed12).abs() <= window && (y - seed34).abs() <= window)
        .collect();
    match inside.len() {
        0 => Err(Error::NoRootInWindow),
        1 => Ok(inside[0]),
        n => Err(Error::MultipleRootsInWindow(n)),
    }
}
