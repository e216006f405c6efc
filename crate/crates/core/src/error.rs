use std::fmt;

use crate::matset::Cardinality;

pub type Result<T> = std::result::Result<T, Error>;

/// Identifies a single matrix inside a set for error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryLocation {
    pub member: usize,
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for EntryLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "member {} entry ({}, {})", self.member, self.row, self.col)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix set must contain at least one matrix")]
    EmptySet,
    #[error("dimension mismatch in {context}: {left:?} vs {right:?}")]
    DimMismatch {
        context: String,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{mode} mode violated at {at}: value {value}")]
    ModeViolation {
        mode: crate::matset::Mode,
        at: EntryLocation,
        value: f64,
    },
    #[error("non-finite entry at {at}")]
    NonFinite { at: EntryLocation },
    #[error("row set {0} is empty")]
    EmptyRowSet(usize),
    #[error("ragged rows: row set {row_set}, row {row} has length {len}, expected {expected}")]
    RaggedRows {
        row_set: usize,
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("chain order violated between members {lower} and {upper} at entry ({row}, {col})")]
    ChainViolation {
        lower: usize,
        upper: usize,
        row: usize,
        col: usize,
    },
    #[error("set cardinality {cardinality} exceeds limit {limit}")]
    CardinalityOverflow { cardinality: Cardinality, limit: u64 },
    #[error("scalar coefficient must be positive, got {0}")]
    NonPositiveScalar(f64),
    #[error("unbound block reference `{0}`")]
    UnboundRef(String),
    #[error("malformed series-parallel graph: {0}")]
    MalformedGraph(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("enumeration needs {required} items, budget is {budget}")]
    BudgetExceeded { required: Cardinality, budget: u64 },
    #[error("vector must be strictly positive (coordinate {index} is {value})")]
    NonPositiveVector { index: usize, value: f64 },
    #[error("vector must be non-negative (coordinate {index} is {value})")]
    NegativeInput { index: usize, value: f64 },
    #[error("no dominant matrix at x = {x:?}: members {candidate} and {offender} have incomparable images")]
    NoDominantMatrix {
        x: Vec<f64>,
        candidate: usize,
        offender: usize,
        step: Option<usize>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid block `{block}`: {reason}")]
    Validation { block: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
