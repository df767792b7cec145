use super::fit::{ipf_fit, Model};
use super::ipf::IpfOptions;
use super::symmetrize::symmetrize_table;
use crate::bintab::{moments, CountTable, ProbTable};
use crate::error::{Error, Result};
use crate::graph::{classify, Graph, TreeClass};
use crate::lincalc::concentration_and_theta;
use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub graph: Graph,
    /// `None` when the selected graph is disconnected.
    pub class: Option<TreeClass>,
    /// Pairs whose partial correlation fell below the threshold.
    pub removed: Vec<(usize, usize)>,
    /// Marginal correlations and partial correlations of the saturated
    /// symmetrized fit.
    pub rho_before: DMatrix<f64>,
    pub theta_before: DMatrix<f64>,
    /// The same for the palindromic fit constrained to the selected graph.
    pub rho_after: DMatrix<f64>,
    pub theta_after: DMatrix<f64>,
}

impl Selection {
    pub fn connected(&self) -> bool {
        self.class.is_some()
    }
}

fn rho_theta(p: &ProbTable) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let rho = moments(p)?.rho;
    let theta = concentration_and_theta(&rho)?.theta;
    Ok((rho, theta))
}

/// Drops every pair with `|theta_ij| < threshold` in the saturated
/// palindromic Ising fit and classifies the remaining graph.
pub fn select_structure(counts: &CountTable, threshold: f64, opts: IpfOptions) -> Result<Selection> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidInput(format!("threshold {threshold} outside [0, 1]")));
    }
    let d = counts.d();
    let saturated = symmetrize_table(counts, opts)?;
    let (rho_before, theta_before) = rho_theta(&saturated)?;
    let mut graph = Graph::complete(d);
    let mut removed = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            if theta_before[(i, j)].abs() < threshold {
                graph.remove_edge(i, j);
                removed.push((i, j));
            }
        }
    }
    let class = if graph.is_connected() { Some(classify(&graph)?) } else { None };
    let refit = ipf_fit(counts, &graph, Model::Palindromic, opts)?;
    let (rho_after, theta_after) = rho_theta(&refit.fitted)?;
    Ok(Selection { graph, class, removed, rho_before, theta_before, rho_after, theta_after })
}
