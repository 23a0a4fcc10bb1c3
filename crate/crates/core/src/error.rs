use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("point is not feasible: residual {residual:e} exceeds tolerance {tolerance:e}")]
    InfeasiblePoint { residual: f64, tolerance: f64 },

    #[error("the feasible set is empty")]
    Infeasible,

    #[error("enumeration of {count} items exceeds the cap of {cap}")]
    SizeLimit { count: u128, cap: u128 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unknown builtin system `{0}`")]
    UnknownBuiltin(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("sampler produced no point with positive residual")]
    EmptySampler,

    #[error("chain violation ({check}): {lhs} > {rhs} at sample {sample:?}")]
    ChainViolation {
        check: &'static str,
        lhs: f64,
        rhs: f64,
        sample: Vec<f64>,
    },
}
