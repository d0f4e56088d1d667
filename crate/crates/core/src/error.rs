use thiserror::Error;

use crate::prox::DualNorm;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate matrix entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("entry ({row}, {col}) out of bounds for a {m}x{n} matrix")]
    EntryOutOfBounds {
        row: usize,
        col: usize,
        m: usize,
        n: usize,
    },

    #[error("row index {index} out of range (m = {m})")]
    RowOutOfRange { index: usize, m: usize },

    #[error("column index {index} out of range (n = {n})")]
    ColOutOfRange { index: usize, n: usize },

    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative weight {weight} for element {id}")]
    NegativeWeight { id: usize, weight: f64 },

    #[error("cannot sample from an empty distribution")]
    EmptyDistribution,

    #[error("orthant anchor must be strictly positive (coordinate {index} is {value})")]
    AnchorNotPositive { index: usize, value: f64 },

    #[error("step size must be positive, got {0}")]
    StepNotPositive(f64),

    #[error("gradient support index {index} out of range (n = {n})")]
    SupportOutOfRange { index: usize, n: usize },

    #[error("prox state kind does not match the prox setup")]
    ProxStateMismatch,

    #[error("gradient entry at index {index} is not finite")]
    NonFiniteGradient { index: usize },

    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("matrix must be square, got {m}x{n}")]
    NotSquare { m: usize, n: usize },

    #[error("row {row} is not a probability distribution: {reason}")]
    NonStochasticRow { row: usize, reason: String },

    #[error("argmax tracker needs at least one row")]
    NoRows,

    #[error("invalid block boundaries: {0}")]
    BadBlocks(String),

    #[error("oracle certifies its bound in {oracle:?} but the prox setup pairs with {prox:?}")]
    IncompatibleNorms { oracle: DualNorm, prox: DualNorm },

    #[error("iterate became non-finite at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },

    #[error("no productive steps: the constraint stayed above eps_g for all {horizon} iterations")]
    NoProductiveSteps { horizon: usize },

    #[error("confidence sigma must lie in (0, 1), got {0}")]
    SigmaOutOfRange(f64),

    #[error("horizon underspecified: provide an explicit horizon or a radius estimate")]
    HorizonUnderspecified,

    #[error("explicit horizon {given} conflicts with the derived value {derived}")]
    HorizonInconsistent { given: usize, derived: usize },

    #[error("best-iterate selection requires an exact objective evaluator")]
    BestIterateNeedsObjective,

    #[error("instance too large for exhaustive enumeration: {size} > {max}")]
    TooLargeForEnumeration { size: usize, max: usize },

    #[error("entropy prox argmax tracking requires equal offsets across rows")]
    NonUniformOffsets,

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
