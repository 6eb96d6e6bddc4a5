use thiserror::Error;

use crate::grid::{Cell, Feature};

/// Errors raised by the simulation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid trial: {0}")]
    InvalidTrial(String),

    #[error("item count {0} outside [2, 9]")]
    BadArity(usize),

    #[error("only {free} free cells for {requested} items")]
    InsufficientSpace { free: usize, requested: usize },

    #[error("origin {0} is out of bounds or a barrier cell")]
    BadOrigin(Cell),

    #[error("item {0} is unreachable")]
    Unreachable(usize),

    #[error("empty choice set")]
    EmptyChoiceSet,

    #[error("signal {0} is consistent with no item")]
    NoConsistentReferent(Feature),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("empty record group")]
    EmptyGroup,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
