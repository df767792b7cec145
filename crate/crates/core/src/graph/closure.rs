use crate::error::{Error, Result};
use crate::set::NodeSet;

/// Square binary matrix; ones mark edges (and the diagonal).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EdgeMatrix {
    n: usize,
    data: Vec<bool>,
}

impl EdgeMatrix {
    pub fn identity(n: usize) -> EdgeMatrix {
        let mut m = EdgeMatrix { n, data: vec![false; n * n] };
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// From rows of 0/1 entries. Requires a square matrix with unit diagonal.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<EdgeMatrix> {
        let n = rows.len();
        let mut m = EdgeMatrix { n, data: vec![false; n * n] };
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!("row {} has length {}", i + 1, row.len())));
            }
            for (j, &x) in row.iter().enumerate() {
                if x > 1 {
                    return Err(Error::InvalidInput("edge matrix entries must be 0 or 1".into()));
                }
                m.set(i, j, x == 1);
            }
            if !m.get(i, i) {
                return Err(Error::InvalidInput("edge matrix needs a unit diagonal".into()));
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.n + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.n + j] = v;
    }
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) as u8).collect()).collect()
    }

    /// Submatrix on the rows and columns of `s`, in increasing index order.
    pub fn submatrix(&self, s: NodeSet) -> EdgeMatrix {
        let idx = s.to_vec();
        let mut m = EdgeMatrix { n: idx.len(), data: vec![false; idx.len() * idx.len()] };
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }
}

/// Partial closure `zer_a`: for each pivot `k` in `a`, every entry `(i, j)`
/// outside the pivot row and column becomes `In[m_ij + m_ik m_kj]`.
pub fn partial_closure(m: &EdgeMatrix, a: NodeSet) -> Result<EdgeMatrix> {
    let n = m.len();
    if let Some(bad) = a.iter().find(|&k| k >= n) {
        return Err(Error::NodeOutOfRange { node: bad + 1, d: n });
    }
    let mut out = m.clone();
    for k in a.iter() {
        let col: Vec<bool> = (0..n).map(|i| out.get(i, k)).collect();
        let row: Vec<bool> = (0..n).map(|j| out.get(k, j)).collect();
        for i in (0..n).filter(|&i| i != k && col[i]) {
            for j in (0..n).filter(|&j| j != k && row[j]) {
                out.set(i, j, true);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn closes_a_v() {
        let v = Graph::from_labels(3, &[(1, 3), (2, 3)]).unwrap().edge_matrix();
        let c = partial_closure(&v, NodeSet::singleton(2)).unwrap();
        assert!(c.get(0, 1) && c.get(1, 0));
    }

    #[test]
    fn complete_graph_is_fixed() {
        let k = Graph::complete(4).edge_matrix();
        assert_eq!(partial_closure(&k, NodeSet::from_nodes([0, 2])).unwrap(), k);
    }

    #[test]
    fn four_cycle_closure_is_order_free() {
        let c4 = Graph::from_labels(4, &[(1, 3), (3, 2), (2, 4), (4, 1)]).unwrap().edge_matrix();
        let both = partial_closure(&c4, NodeSet::from_nodes([2, 3])).unwrap();
        let a = partial_closure(&partial_closure(&c4, NodeSet::singleton(2)).unwrap(), NodeSet::singleton(3)).unwrap();
        let b = partial_closure(&partial_closure(&c4, NodeSet::singleton(3)).unwrap(), NodeSet::singleton(2)).unwrap();
        assert_eq!(both, a);
        assert_eq!(both, b);
        assert!(both.get(0, 1));
    }

    #[test]
    fn upper_triangular_dag_gives_transitive_closure() {
        // 1 <- 2 <- 3 drawn as arrows in an upper-triangular edge matrix
        let m = EdgeMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let all = partial_closure(&m, NodeSet::full(3)).unwrap();
        assert!(all.get(0, 2));
        assert!(!all.get(2, 0));
    }

    #[test]
    fn rejects_out_of_range() {
        let m = EdgeMatrix::identity(2);
        assert!(partial_closure(&m, NodeSet::singleton(5)).is_err());
    }
}
