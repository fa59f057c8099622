use thiserror::Error;

use crate::order::UntieError;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("atom count {0} outside 1..=64")]
    InvalidAtomCount(usize),
    #[error("atom {atom} outside 1..={n}")]
    AtomOutOfRange { atom: u64, n: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("n = {n} exceeds the limit of {limit} for {what}")]
    TooLarge { n: usize, limit: usize, what: &'static str },
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("weight of atom {0} is not positive")]
    NonpositiveWeight(usize),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Untie(#[from] Box<UntieError>),
    #[error("format error: {0}")]
    Format(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<UntieError> for Error {
    fn from(e: UntieError) -> Self {
        Error::Untie(Box::new(e))
    }
}
