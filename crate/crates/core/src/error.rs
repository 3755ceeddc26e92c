use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid rates: {0}")]
    InvalidRates(String),

    #[error("rates not distinct: {detail}")]
    NotDistinct { detail: String },

    #[error("unstable: max load {max_load} >= 1")]
    Unstable { max_load: f64 },

    #[error("point {0:?} is not in the Weyl chamber (coordinates must be nonincreasing)")]
    NotInChamber(Vec<i64>),

    #[error("window indices out of order: i={i} > j={j}")]
    IndexOrder { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("determinant formula needs distinct variables; use the GT-sum method instead")]
    CoincidentVariables,

    #[error("negative exponent on a zero weight")]
    ZeroWeightNegativeExponent,

    #[error("tolerance {requested:e} not achievable within the configured box (achieved {achieved:e})")]
    ToleranceUnachievable { requested: f64, achieved: f64 },

    #[error("insufficient usable points: {usable} above numeric floor {floor:e} (need at least {needed})")]
    InsufficientData {
        usable: usize,
        needed: usize,
        floor: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
