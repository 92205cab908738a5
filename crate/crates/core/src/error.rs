use thiserror::Error;

use crate::kb::{ParseError, ValidationError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("{count} atoms exceed the configured cap of {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("the hard constraints are inconsistent")]
    InconsistentBase,
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("priority declarations form a cycle through `{0}`")]
    PriorityCycle(String),
    #[error("set-level independence statement is malformed: {0}")]
    OverlapError(String),
}
