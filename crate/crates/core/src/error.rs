use thiserror::Error;

/// Errors raised by the telic library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TelicError {
    #[error("unknown history: no table entry for prefix `{prefix}`")]
    UnknownHistory { prefix: String },

    #[error("enumeration too large: {size} experiences exceeds cap {cap}")]
    EnumerationTooLarge { size: f64, cap: usize },

    #[error("no samples")]
    NoSamples,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid goal: {0}")]
    InvalidGoal(String),

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),

    #[error("unreachable state `{state}`: absolute continuity violated")]
    AbsoluteContinuity { state: String },

    #[error("divergent start: objective is not finite at the current parameters")]
    DivergentStart,

    #[error("gradient overflow in component {index}")]
    GradientOverflow { index: usize },

    #[error("invalid step size {0}")]
    InvalidStepSize(f64),

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("state `{0}` not found in search domain")]
    StateNotFound(String),

    #[error("no split needed: state `{0}` is already reachable")]
    NoSplitNeeded(String),

    #[error("split collision: region `{new}` overlaps `{existing}`")]
    SplitCollision { new: String, existing: String },

    #[error("split produced no new state while splitting `{0}`")]
    SplitCollapsed(String),

    #[error("bisection did not converge within {0} iterations")]
    BisectionNonConvergence(usize),

    #[error("refinement did not converge after {rounds} rounds; unreachable: {unreachable:?}")]
    RefinementDidNotConverge { rounds: usize, unreachable: Vec<String> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = TelicError> = std::result::Result<T, E>;
