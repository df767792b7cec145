//! Ising models with hollow-tree structure.
//!
//! Library indices are 0-based; file formats, messages and `Display`
//! output use 1-based node labels.

// `!(x > 0.0)` style checks deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bintab;
pub mod error;
pub mod graph;
pub mod infer;
pub mod io;
pub mod lincalc;
pub mod set;

pub use error::{Error, Result};
pub use set::NodeSet;
