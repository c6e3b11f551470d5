// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid shape: {0}")]
    InvalidShape(String),

    #[error("operation requires a Boolean table (l = 2), got l = {0}")]
    NotBoolean(u32),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("value {value} at index {index} is out of range for l = {l}")]
    ValueOutOfRange { index: usize, value: u16, l: u32 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("side length {0} is not a power of two")]
    NotPowerOfTwo(u32),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("contract violated: {0}")]
    ContractViolation(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
