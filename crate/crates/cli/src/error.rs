use hoffman_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 2 parse or validation, 3 infeasible, 4 size limit, 5 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Infeasible => 3,
                Error::SizeLimit { .. } => 4,
                Error::NumericalFailure(_) | Error::ChainViolation { .. } => 5,
                Error::DimensionMismatch { .. }
                | Error::InvalidSystem(_)
                | Error::InfeasiblePoint { .. }
                | Error::UnknownBuiltin(_)
                | Error::UnknownFixture(_)
                | Error::InvalidSchedule(_)
                | Error::EmptySampler => 2,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(Error::Infeasible).exit_code(), 3);
        assert_eq!(CliError::from(Error::SizeLimit { count: 5, cap: 1 }).exit_code(), 4);
        assert_eq!(CliError::from(Error::NumericalFailure("lp".into())).exit_code(), 5);
        assert_eq!(CliError::from(Error::UnknownFixture("f".into())).exit_code(), 2);
    }
}
