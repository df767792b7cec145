//! Symmetrization, maximum-likelihood fitting, likelihood-ratio tests,
//! 3-factor screening and structure selection for binary tables.

mod fit;
mod ipf;
mod lrtest;
mod screen;
mod select;
mod symmetrize;

pub use fit::{avar_lambda12, fit_hollow_tree, ipf_fit, lambda_tstats, FitReport, Model, TstatMethod};
pub use ipf::{deviance, ipf, IpfOptions, IpfOutcome, Margin};
pub use lrtest::{decomposed_tests, lr_test_between, lr_test_within, TestKind, TestResult};
pub use screen::{screen_3factor, ScreenMethod, ScreenReport, ScreenRow};
pub use select::{select_structure, Selection};
pub use symmetrize::{symmetrize_2x2, symmetrize_table};
