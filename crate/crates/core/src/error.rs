use thiserror::Error;

/// Errors raised by the library. Node indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("node {node} out of range 1..={d}")]
    NodeOutOfRange { node: usize, d: usize },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not a hollow tree: {0}")]
    NotHollowTree(String),
    #[error("node set {0} is not a prime of the graph")]
    NotPrime(String),
    #[error("cell {cell} is zero; log-based transform undefined")]
    ZeroCell { cell: usize },
    #[error("zero cell in sufficient margin {margin}")]
    ZeroMargin { margin: String },
    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvent,
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("singular pivot at index {0}")]
    SingularPivot(usize),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("no root within the search window")]
    NoRootInWindow,
    #[error("{0} roots within the search window")]
    MultipleRootsInWindow(usize),
    #[error("no convergence after {iterations} iterations (discrepancy {discrepancy:.3e})")]
    NonConvergence { iterations: usize, discrepancy: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("pair {0}-{1} is adjacent in the cycle")]
    AdjacentPair(usize, usize),
    #[error("graphs have different skeletons")]
    DifferentSkeletons,
    #[error("invalid elimination scheme: {0}")]
    InvalidScheme(String),
}

pub type Result<T> = std::result::Result<T, Error>;
