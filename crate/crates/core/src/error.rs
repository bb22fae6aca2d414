//! Error type shared by every module of the crate.

use alloc::string::String;

/// Errors raised by the solver, sampler, estimators and simulators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// No point survived the eligibility filter.
    #[error("no eligible points (every gain is at or below the eligibility threshold)")]
    EmptyInstance,
    /// Adversary budget outside `[0, n)`.
    #[error("invalid adversary budget m = {m} for n = {n} eligible points")]
    InvalidBudget {
        /// Requested budget.
        m: f64,
        /// Number of eligible points.
        n: usize,
    },
    /// Relative loss weight outside `[0, 1]`.
    #[error("relative loss weight w = {0} is outside [0, 1]")]
    InvalidWeight(f64),
    /// A loss is negative.
    #[error("loss at index {index} is negative ({value})")]
    NegativeLoss {
        /// Caller index.
        index: usize,
        /// Offending value.
        value: f64,
    },
    /// NaN or infinite input.
    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),
    /// Two index-aligned inputs disagree in length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Actual length.
        got: usize,
    },
    /// Input is not a probability distribution.
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    /// Batch size below one.
    #[error("batch size must be at least 1")]
    InvalidBatch,
    /// Inclusion probabilities for dependent rounding must sum to an integer.
    #[error("inclusion probabilities sum to {0}, which is not an integer")]
    NonIntegralTotal(f64),
    /// A probability lies outside `[0, 1]`.
    #[error("value {value} at index {index} is outside [0, 1]")]
    OutOfRange {
        /// Offending index.
        index: usize,
        /// Offending value.
        value: f64,
    },
    /// Empty validation sample.
    #[error("validation sample is empty")]
    EmptyValidation,
    /// Parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A prediction has fewer than two classes.
    #[error("prediction needs at least two classes, got {0}")]
    TooFewClasses(usize),
    /// A prediction does not sum to one or has negative entries.
    #[error("prediction is not normalized (sum = {0})")]
    NotNormalized(f64),
    /// Grid oracle asked for too many points.
    #[error("grid oracle supports at most 4 points, got {0}")]
    TooLarge(usize),
    /// Grid step outside `(0, 0.1]`.
    #[error("grid step {0} is outside (0, 0.1]")]
    InvalidStep(f64),
    /// Simulator configuration is inconsistent.
    #[error("configuration error: {0}")]
    ConfigError(String),
    /// A simulated game ran out of points to select.
    #[error("pool has {available} points left but {requested} were requested")]
    BudgetExhausted {
        /// Points remaining.
        available: usize,
        /// Points requested.
        requested: usize,
    },
    /// The distillation pool cannot supply `T * b` queries.
    #[error("unlabeled pool exhausted: {available} points left, {requested} requested")]
    PoolExhausted {
        /// Points remaining.
        available: usize,
        /// Points requested.
        requested: usize,
    },
    /// Training diverged.
    #[error("training loss became non-finite at epoch {0}")]
    NonFiniteLoss(usize),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = core::result::Result<T, E>;
