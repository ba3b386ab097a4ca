//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by configuration validation, budget accounting, and I/O.
#[derive(Error, Debug)]
pub enum Error {
    /// A physical or experiment configuration violates an invariant.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// An operation received an argument outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A policy or schedule was given fewer pilots than it needs.
    #[error("insufficient budget: {0}")]
    InsufficientBudget(String),

    /// A budget-tracked sampler has no pilots left.
    #[error("pilot budget exhausted: {used} of {budget} used")]
    BudgetExhausted { used: u64, budget: u64 },

    /// Pilot accounting would exceed the block length.
    #[error("invalid budget: {n_pilots} pilots exceed {total_slots} slots")]
    InvalidBudget { n_pilots: u64, total_slots: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
