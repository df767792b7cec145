use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Largest `d` for which tables and transforms are supported.
pub const MAX_VARS: usize = 20;
/// Largest `d` for which the dense Hadamard matrix is materialised.
pub const MAX_DENSE: usize = 12;

pub(crate) fn check_vars(d: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::InvalidInput("need at least one variable".into()));
    }
    if d > MAX_VARS {
        return Err(Error::SizeGuard(format!("d = {d} exceeds {MAX_VARS}")));
    }
    Ok(())
}

/// Dense Hadamard matrix `H_d`, the d-th Kronecker power of `[[1, 1], [1, -1]]`.
/// Entry `(k, j)` is `(-1)^{|k & j|}`; row `k` belongs to the subset of set bits of `k`.
pub fn hadamard(d: usize) -> Result<DMatrix<f64>> {
    check_vars(d)?;
    if d > MAX_DENSE {
        return Err(Error::SizeGuard(format!("dense Hadamard matrix limited to d <= {MAX_DENSE}; use fwht")));
    }
    let n = 1usize << d;
    Ok(DMatrix::from_fn(n, n, |k, j| if (k & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 }))
}

/// In-place fast Walsh-Hadamard transform: `v <- H_d v`.
pub fn fwht(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}
