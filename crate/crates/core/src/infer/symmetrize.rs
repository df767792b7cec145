use super::ipf::{ipf, IpfOptions, Margin};
use crate::bintab::{CountTable, ProbTable};
use crate::error::{Error, Result};
use crate::set::NodeSet;

/// Odds-ratio preserving symmetrization of a 2x2 table in cell order
/// `[alpha, beta, gamma, delta]` = `(-,-), (+,-), (-,+), (+,+)`.
/// The result is proportional to `(sqrt(alpha delta), sqrt(beta gamma))` on
/// and off the diagonal, normalized to sum to one.
pub fn symmetrize_2x2(t: [f64; 4]) -> Result<[f64; 4]> {
    if let Some(cell) = t.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::ZeroCell { cell });
    }
    let on = (t[0] * t[3]).sqrt();
    let off = (t[1] * t[2]).sqrt();
    let z = 2.0 * (on + off);
    Ok([on / z, off / z, off / z, on / z])
}

/// Symmetrized two-way margins for the given pairs, in the order given.
pub(crate) fn symmetrized_margins(counts: &CountTable, pairs: &[(usize, usize)]) -> Result<Vec<Margin>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let vars = NodeSet::from_nodes([i, j]);
            let m = counts.marginal(vars);
            let s = symmetrize_2x2([m[0], m[1], m[2], m[3]]).map_err(|_| Error::ZeroMargin { margin: vars.to_string() })?;
            Ok(Margin { vars, target: s.to_vec() })
        })
        .collect()
}

/// Saturated palindromic Ising fit: every two-way margin is symmetrized
/// and the tables are combined by IPF starting from the uniform table.
pub fn symmetrize_table(counts: &CountTable, opts: IpfOptions) -> Result<ProbTable> {
    let d = counts.d();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let margins = symmetrized_margins(counts, &pairs)?;
    let start = vec![1.0 / (1u64 << d) as f64; 1 << d];
    let out = ipf(d, &margins, &start, opts, None)?;
    ProbTable::new(out.probs)
}
