//! Stability and stabilizability of positive switching systems.
//!
//! A switching system `x(k+1) = A(k) x(k)` picks `A(k)` from a finite set of
//! non-negative matrices at every step. For sets with independent row
//! uncertainty, linearly ordered chains, and anything built from those by
//! Minkowski sums and products (series-parallel block diagrams), the joint
//! and lower spectral radii are attained by single members. This crate
//! computes those members, certifies the verdicts against brute-force
//! product enumeration, and builds extremal switching trajectories greedily.
//!
//! ```
//! use posswitch::{Matrix, MatrixSet, Mode};
//! use posswitch::spectral::{analyze, AnalyzeOptions};
//!
//! let set = MatrixSet::iru(
//!     vec![vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![vec![0.5, 0.5], vec![1.0, 0.2]]],
//!     Mode::Positive,
//! )
//! .unwrap();
//! let report = analyze(&set, &AnalyzeOptions::default()).unwrap();
//! assert!(!report.stable);
//! # let _ = Matrix::identity(2);
//! ```
//!
//! The `examples/` directory has one runnable program per capability.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod hourglass;
pub mod matrix;
pub mod matset;
pub mod oracle;
pub mod spectral;
pub mod system;
pub mod trajectory;

use serde::{Deserialize, Serialize};

pub use algebra::{compile_graph, eval_poly, mink_add, mink_mul, scale, BlockGraph, CompositionExpr, SpGraph};
pub use error::{Error, Result};
pub use matrix::{Matrix, NormKind};
pub use matset::{Cardinality, MatrixSet, MemberId, Mode, SetKind};
pub use trajectory::{greedy_trajectory, stabilizing_sequence, MonotoneObjective};

/// Whether a search maximizes or minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Max => "max",
            Direction::Min => "min",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Direction::Max),
            "min" => Ok(Direction::Min),
            _ => Err(format!("unknown direction `{s}` (expected max or min)")),
        }
    }
}
