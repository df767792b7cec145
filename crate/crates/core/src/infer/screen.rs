use crate::bintab::{level, CountTable};
use crate::error::{Error, Result};
use crate::set::NodeSet;
use serde::{Deserialize, Serialize};

/// How the trivariate moment is formed before testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenMethod {
    /// Mean of the product of the three standardized variables.
    #[default]
    Standardized,
    /// Mean of the product of the raw +-1 levels.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenRow {
    pub triple: NodeSet,
    pub xi: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenReport {
    pub method: ScreenMethod,
    pub rows: Vec<ScreenRow>,
    /// All `|t| < 2`.
    pub close_to_ising: bool,
}

/// Estimated 3-factor linear interaction for each triple with its
/// t-value `xi sqrt(n) / sd(w)`, where `w` is the per-observation product
/// whose mean is `xi`. For raw levels `w^2 = 1` and `sd(w) = sqrt(1 - xi^2)`.
pub fn screen_3factor(counts: &CountTable, method: ScreenMethod) -> Result<ScreenReport> {
    let n = counts.total();
    if !(n > 0.0) {
        return Err(Error::InvalidInput("total count must be positive".into()));
    }
    let d = counts.d();
    let cells = counts.counts();
    let mean: Vec<f64> = (0..d).map(|s| cells.iter().enumerate().map(|(k, x)| x * level(k, s)).sum::<f64>() / n).collect();
    let (shift, scale): (Vec<f64>, Vec<f64>) = match method {
        ScreenMethod::Raw => (vec![0.0; d], vec![1.0; d]),
        ScreenMethod::Standardized => {
            if let Some(s) = mean.iter().position(|m| 1.0 - m * m <= 0.0) {
                return Err(Error::ZeroMargin { margin: NodeSet::singleton(s).to_string() });
            }
            (mean.clone(), mean.iter().map(|m| (1.0 - m * m).sqrt()).collect())
        }
    };
    let z = |k: usize, s: usize| (level(k, s) - shift[s]) / scale[s];
    let mut rows = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                let (mut m1, mut m2) = (0.0, 0.0);
                for (k, x) in cells.iter().enumerate() {
                    let w = z(k, a) * z(k, b) * z(k, c);
                    m1 += x * w;
                    m2 += x * w * w;
                }
                let xi = m1 / n;
                let var = m2 / n - xi * xi;
                let t = if xi == 0.0 { 0.0 } else { xi * n.sqrt() / var.sqrt() };
                rows.push(ScreenRow { triple: NodeSet::from_nodes([a, b, c]), xi, t });
            }
        }
    }
    let close_to_ising = rows.iter().all(|r| r.t.abs() < 2.0);
    Ok(ScreenReport { method, rows, close_to_ising })
}
