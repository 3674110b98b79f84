use thiserror::Error;

/// Errors produced by graph construction, Hamiltonian assembly, spectral
/// evolution and the search/noise drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: n = {n} ({reason})")]
    InvalidSize { n: usize, reason: &'static str },

    #[error("invalid vertex pair: i = j = {v}")]
    InvalidPair { v: usize },

    #[error("vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid edge {{{i},{j}}}: self-loops are not allowed")]
    SelfLoop { i: usize, j: usize },

    #[error("duplicate edge {{{i},{j}}}")]
    DuplicateEdge { i: usize, j: usize },

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: String },

    #[error("no path between vertices {i} and {j}")]
    NoPath { i: usize, j: usize },

    #[error("full-space construction limited to n <= {limit}, got n = {n}")]
    SizeLimit { n: usize, limit: usize },

    #[error("noise variance must be >= 0, got {variance}")]
    InvalidVariance { variance: f64 },

    #[error("non-finite numeric input: {what}")]
    NumericInput { what: String },

    #[error("numeric consistency violated: {what}")]
    NumericConsistency { what: String },

    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative radicand {radicand} for {family} closed form")]
    Domain { family: &'static str, radicand: f64 },

    #[error("closed forms require n >= 4, got n = {n}")]
    UnsupportedSize { n: usize },

    #[error("invalid search window [{lo}, {hi}]")]
    InvalidWindow { lo: f64, hi: f64 },

    #[error("invalid time grid: {what}")]
    InvalidGrid { what: String },

    #[error("unsupported graph for this operation: {what}")]
    UnsupportedGraph { what: String },

    #[error("edge list parse error at line {line}: {what}")]
    EdgeListParse { line: usize, what: String },
}

pub type Result<T> = std::result::Result<T, Error>;
