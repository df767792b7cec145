//! File formats and serializable report types.
//!
//! Tables are JSON `{"d", "levels", "order", "cells"}` or CSV with one
//! column per variable plus a `count` column. Cells are ordered with the
//! first variable changing fastest; level `0` in 0/1 coding maps to `-1`.

use crate::bintab::CountTable;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphFile, PrimeDecomposition, TreeClass};
use crate::infer::{FitReport, Model, Selection};
use crate::set::NodeSet;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const LEX_FIRST_FASTEST: &str = "lex_first_fastest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Levels {
    #[serde(rename = "pm1")]
    PlusMinus,
    #[serde(rename = "01")]
    ZeroOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub d: usize,
    pub levels: Levels,
    pub order: String,
    pub cells: Vec<f64>,
}

impl TableFile {
    pub fn from_counts(c: &CountTable) -> TableFile {
        TableFile { d: c.d(), levels: Levels::PlusMinus, order: LEX_FIRST_FASTEST.into(), cells: c.counts().to_vec() }
    }

    pub fn to_counts(&self) -> Result<CountTable> {
        if self.order != LEX_FIRST_FASTEST {
            return Err(Error::InvalidInput(format!("unsupported cell order {:?}", self.order)));
        }
        if self.d > crate::bintab::MAX_VARS || self.cells.len() != 1 << self.d {
            return Err(Error::InvalidInput(format!("expected 2^{} cells, found {}", self.d, self.cells.len())));
        }
        CountTable::new(self.cells.clone())
    }
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(e.to_string())
}

pub fn graph_from_json(s: &str) -> Result<Graph> {
    let f: GraphFile = serde_json::from_str(s).map_err(parse_err)?;
    Graph::try_from(&f)
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string(&GraphFile::from(g)).expect("graph serializes")
}

pub fn table_from_json(s: &str) -> Result<CountTable> {
    let f: TableFile = serde_json::from_str(s).map_err(parse_err)?;
    f.to_counts()
}

/// Reads a CSV table: every column but the last holds a variable's level
/// (`-1`/`1` or `0`/`1`), the last column is named `count`. Repeated level
/// combinations are summed and absent ones count as zero.
pub fn table_from_csv(s: &str) -> Result<CountTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(s.as_bytes());
    let headers = rdr.headers().map_err(parse_err)?.clone();
    let ncol = headers.len();
    if ncol < 2 || headers.get(ncol - 1) != Some("count") {
        return Err(Error::InvalidInput("CSV needs level columns followed by a count column".into()));
    }
    let d = ncol - 1;
    if d > crate::bintab::MAX_VARS {
        return Err(Error::SizeGuard(format!("{d} variables exceed the limit of {}", crate::bintab::MAX_VARS)));
    }
    let mut rows = Vec::new();
    let mut zero_seen = false;
    let mut minus_seen = false;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(parse_err)?;
        let mut levels = Vec::with_capacity(d);
        for v in rec.iter().take(d) {
            match v {
                "-1" => minus_seen = true,
                "0" => zero_seen = true,
                "1" | "+1" => {}
                other => return Err(Error::InvalidInput(format!("row {}: bad level {other:?}", line + 1))),
            }
            levels.push(v == "1" || v == "+1");
        }
        let n: f64 = rec.get(d).unwrap_or("").parse().map_err(|_| Error::InvalidInput(format!("row {}: bad count", line + 1)))?;
        rows.push((levels, n));
    }
    if zero_seen && minus_seen {
        return Err(Error::InvalidInput("CSV mixes 0/1 and -1/1 level coding".into()));
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("CSV has no rows".into()));
    }
    let mut cells = vec![0.0; 1 << d];
    for (levels, n) in rows {
        let k: usize = levels.iter().enumerate().filter(|(_, &up)| up).map(|(s, _)| 1 << s).sum();
        cells[k] += n;
    }
    CountTable::new(cells)
}

/// Writes a table as CSV with columns `A1..Ad` in -1/1 coding and `count`.
pub fn table_to_csv(c: &CountTable) -> String {
    let d = c.d();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=d).map(|s| format!("A{s}")).collect();
    header.push("count".into());
    w.write_record(&header).expect("in-memory write");
    for (k, n) in c.counts().iter().enumerate() {
        let mut rec: Vec<String> = (0..d).map(|s| if k >> s & 1 == 1 { "1".into() } else { "-1".into() }).collect();
        rec.push(n.to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Reads a table file, choosing the format from the extension (`.csv` or JSON).
pub fn read_table(path: &Path) -> Result<CountTable> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        table_from_csv(&s)
    } else {
        table_from_json(&s)
    }
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    graph_from_json(&s)
}

/// Dense matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DMatrix<f64>> for MatrixJson {
    fn from(m: &DMatrix<f64>) -> Self {
        let data = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
        MatrixJson { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermValue {
    pub term: NodeSet,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub primes: Vec<NodeSet>,
    pub cutsets: Vec<NodeSet>,
    pub scheme: Vec<NodeSet>,
    pub final_prime: NodeSet,
    pub class: TreeClass,
}

impl DecompositionJson {
    pub fn new(dec: &PrimeDecomposition, class: TreeClass) -> Self {
        DecompositionJson {
            primes: dec.primes.clone(),
            cutsets: dec.cutsets.clone(),
            scheme: dec.scheme.clone(),
            final_prime: dec.final_prime,
            class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub graph: GraphFile,
    pub model: Model,
    pub n: f64,
    pub chi2: f64,
    pub df: usize,
    /// Free terms on the expected-count scale.
    pub lambda: Vec<TermValue>,
    /// Free terms on the probability scale.
    pub lambda_prob: Vec<TermValue>,
    pub tstats: Vec<TermValue>,
    pub iterations: usize,
    pub discrepancy: f64,
    pub tolerance: f64,
}

impl From<&FitReport> for FitJson {
    fn from(f: &FitReport) -> Self {
        let terms = |l: &crate::bintab::InteractionSet| f.free_terms.iter().map(|&s| TermValue { term: s, value: l.get(s) }).collect();
        FitJson {
            graph: GraphFile::from(&f.graph),
            model: f.model,
            n: f.n,
            chi2: f.chi2,
            df: f.df,
            lambda: terms(&f.lambda),
            lambda_prob: terms(&f.lambda_prob),
            tstats: f.tstats.iter().map(|&(s, t)| TermValue { term: s, value: t }).collect(),
            iterations: f.iterations,
            discrepancy: f.discrepancy,
            tolerance: f.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionJson {
    pub threshold: f64,
    pub graph: GraphFile,
    pub removed: Vec<[usize; 2]>,
    pub connected: bool,
    pub class: Option<TreeClass>,
    pub rho_before: MatrixJson,
    pub theta_before: MatrixJson,
    pub rho_after: MatrixJson,
    pub theta_after: MatrixJson,
}

impl SelectionJson {
    pub fn new(s: &Selection, threshold: f64) -> Self {
        SelectionJson {
            threshold,
            graph: GraphFile::from(&s.graph),
            removed: s.removed.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            connected: s.connected(),
            class: s.class,
            rho_before: (&s.rho_before).into(),
            theta_before: (&s.theta_before).into(),
            rho_after: (&s.rho_after).into(),
            theta_after: (&s.theta_after).into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_codings_agree() {
        let pm = "A,B,count\n-1,-1,1\n1,-1,2\n-1,1,3\n1,1,4\n";
        let zo = "A,B,count\n0,0,1\n1,0,2\n0,1,3\n1,1,4\n";
        let a = table_from_csv(pm).unwrap();
        assert_eq!(a, table_from_csv(zo).unwrap());
        assert_eq!(a.counts(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(table_from_csv(&table_to_csv(&a)).unwrap(), a);
        assert!(table_from_csv("A,B,count\n0,-1,1\n").is_err());
        assert!(table_from_csv("A,B,count\n").is_err());
    }

    #[test]
    fn json_table_and_graph() {
        let t = table_from_json(r#"{"d":2,"levels":"01","order":"lex_first_fastest","cells":[1,2,3,4]}"#).unwrap();
        assert_eq!(t.counts(), &[1.0, 2.0, 3.0, 4.0]);
        assert!(table_from_json(r#"{"d":2,"levels":"01","order":"lex_first_fastest","cells":[1,2,3]}"#).is_err());
        assert!(table_from_json(r#"{"d":2,"levels":"01","order":"last_fastest","cells":[1,2,3,4]}"#).is_err());
        let g = graph_from_json(r#"{"d":3,"edges":[[1,2],[2,3]]}"#).unwrap();
        assert_eq!(graph_to_json(&g), r#"{"d":3,"edges":[[1,2],[2,3]]}"#);
        assert!(graph_from_json("{").is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let j = MatrixJson::from(&m);
        assert_eq!(j.data, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(j.to_matrix(), m);
    }
}
