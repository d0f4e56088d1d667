//! Randomized mirror descent for sparse problems.
//!
//! The crate couples three mirror-map setups (Euclidean free, Euclidean
//! orthant, entropy simplex) with randomized sparse subgradient oracles:
//! the PageRank double-sampling and sum-randomization estimators, and the
//! two-spike estimator for max-of-scalar-convex objectives. Around them
//! sits the machinery that keeps per-iteration cost proportional to
//! sparsity: weight-tree sampling, incremental row-dot caches, and a
//! segment tree that tracks the active row of a max-form objective.

pub mod argmax;
pub mod error;
pub mod market;
pub mod oracles;
pub mod prox;
pub mod rng;
pub mod sampling;
pub mod solver;
pub mod sparse;

pub use argmax::{ArgmaxTree, BlockArgmax, SimplexArgmaxTracker};
pub use error::{Error, Result};
pub use oracles::{BlockSumProblem, MaxFormProblem, PageRankProblem, SigmaFamily, StochGrad};
pub use prox::{DualNorm, ProxSetup, ProxState, SimplexState, StepMode};
pub use rng::TrajectoryRng;
pub use sampling::{signed_row_samplers, SignedRowSampler, WeightTree};
pub use solver::{
    amplify, constrained_mirror_descent, derive_horizon, mirror_descent, ConstrainedConfig,
    RunReport, SolverConfig,
};
pub use sparse::{RowDotCache, SparseMatrixDual};
