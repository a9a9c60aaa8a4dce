//! Combinatorial machinery behind first-order zero-one laws on sparse random
//! graphs `G(n, n^{-alpha})`.
//!
//! The crate is organised around seven pieces:
//!
//! - [`graph`] — finite simple graphs with bitset adjacency, nested (rooted)
//!   pairs, labeled extensions, graph6/DOT serialization;
//! - [`canon`] — exact canonical forms (plain and root-fixing) by ordered
//!   partition refinement with backtracking;
//! - [`ext`] — the exact rational density calculus: `f_alpha`,
//!   safe/rigid/neutral classification, maximal subgraph density;
//! - [`fo`] — FO(=,~) sentences: parser, quantifier depth, evaluation;
//! - [`game`] — exact Ehrenfeucht game solver with distinguishing-formula
//!   synthesis;
//! - [`gset`] — the layered family of dangerous rooted neighbourhood graphs
//!   and its verification report;
//! - [`profiles`] — vertex profiles over bad subgraphs, template extensions,
//!   specifications, and the witness-graph builder;
//! - [`probe`] — seeded `G(n, p)` sampling and Monte-Carlo experiments.

pub mod canon;
pub mod enumerate;
pub mod ext;
pub mod fo;
pub mod game;
pub mod graph;
pub mod graph6;
pub mod gset;
pub mod probe;
pub mod profiles;
pub mod rational;

pub use ext::{classify_pair, f_alpha, rho_max_bruteforce, rho_max_flow, PairClass};
pub use fo::Formula;
pub use game::{solve, GameOutcome, Winner};
pub use graph::{Graph, LabeledPair, RootedPair};
pub use rational::Rat;

/// Errors produced by the workbench operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate vertex {0} in input set")]
    DuplicateVertex(usize),
    #[error("size bound exceeded: {what} is {got}, limit {limit}")]
    SizeBound {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("labelings have mismatched lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("labeling is not a valid vertex ordering: {0}")]
    BadLabeling(String),
    #[error("H must be a strict subgraph of G")]
    DegeneratePair,
    #[error("pairs are not nested: {0}")]
    NotNested(String),
    #[error("empty graph has no subgraph density")]
    EmptyGraph,
    #[error("root vertex {0} is not in T")]
    RootNotInT(usize),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unbound variable `{0}` in sentence")]
    UnboundVariable(String),
    #[error("arity mismatch: expected {expected} roots, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("ordering is not canonical for the template copy")]
    NonCanonicalOrder,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("proven conclusion failed (implementation bug): {0}")]
    ConclusionFailed(String),
    #[error("path condition violated: {0}")]
    PathCondition(String),
    #[error("parameters out of range: {0}")]
    BadParams(String),
    #[error("configured bounds are infeasible without an explicit override: {0}")]
    Infeasible(String),
    #[error("probability {0} out of range")]
    BadProbability(f64),
    #[error("cell budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad file format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
