//! Error type shared by the library.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("packet not in space")]
    PacketNotInSpace,
    #[error("JL transfer failed")]
    JlTransferFailed,
    #[error("class set incomplete: {0}")]
    ClassSetIncomplete(String),
    #[error("not ordinary; use ± theory")]
    NotOrdinary,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
