//! Discrete m-Laplacian calculus on locally finite weighted graphs.
//!
//! The crate provides:
//!
//! - [`graph`]: an immutable weighted-graph type with the nonlinear
//!   m-Laplacian, gradient form, hop-distance balls and the two ball-volume
//!   functions `V_o(n)` / `W_o(n)`;
//! - [`params`]: classification of `(m, p, q)` triples into the growth
//!   regions `G1..G6` / `K1..K4`, the admissible test-function exponents,
//!   and the sharp volume-growth threshold functions;
//! - [`tree`]: radially weighted homogeneous-tree constructions carrying
//!   explicit positive supersolutions of `Δ_m u + u^p |∇u|^q ≤ 0`, together
//!   with the Λ-ratios that certify them and their closed-form limits;
//! - [`verify`]: residual sweeps, Harnack ratio checks, radial cutoff
//!   functions, the Caccioppoli-type summed estimate, the min-neighbor
//!   descent diagnostic and the volume-series parabolicity test;
//! - [`hiprec`]: a small arbitrary-precision evaluation layer used where
//!   the Λ-ratios suffer catastrophic cancellation.

pub mod graph;
pub mod hiprec;
pub mod lognum;
pub mod params;
pub mod tree;
pub mod verify;

pub use graph::{EdgeWeight, Residual, VertexFunction, WeightedGraph};
pub use params::{GRegion, KRegion, ParamTriple};
pub use tree::{CaseTag, RadialProfile};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular denominator: {0}")]
    SingularDenominator(String),
    #[error("unsupported region for this operation: {0}")]
    UnsupportedRegion(String),
    #[error("constants not found: {0}")]
    ConstantsNotFound(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
