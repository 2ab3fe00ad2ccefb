//! Circuit synthesizers.

mod dc;
mod hybrid;
mod parallel;
mod time;

pub use dc::{compile_dc, compile_disentangler, synthesize_dc, Disentangler, StageReport};
pub use hybrid::{compile_hybrid, synthesize_hybrid};
pub use parallel::parallelize_cswaps;
pub use time::synthesize_time;

use thiserror::Error;

use crate::circuit::Circuit;
use crate::tree::TreeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("lambda {lambda} out of range 1..={n}")]
    LambdaOutOfRange { lambda: usize, n: usize },
    #[error("disentangler input is not a unit vector (norm {0})")]
    NonUnitInput(f64),
    #[error("disentangler register has {wires} wires but the states have dimension {dim}")]
    AncillaMismatch { wires: usize, dim: usize },
    #[error("overlap {0} is negative after the sign convention")]
    NegativeOverlapAfterConvention(f64),
    #[error("circuit structure not recognized: {0}")]
    UnrecognizedStructure(String),
    #[error("{0}")]
    IncompatibleOptions(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DcOptions {
    /// Emit disentangling measurements and phase corrections after each
    /// combining stage.
    pub disentangle: bool,
    /// Reschedule movable controlled swaps for linear gate depth.
    pub parallelize: bool,
    /// Skip zero rotations, trivial subtrees and redundant combining stages.
    pub prune: bool,
}

impl Default for DcOptions {
    fn default() -> Self {
        DcOptions { disentangle: true, parallelize: false, prune: false }
    }
}

/// A synthesized circuit together with per-stage measurement bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    pub circuit: Circuit,
    pub stages: Vec<StageReport>,
}
