use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("modulus {0} is too large for a discrete-log table (limit 2^32)")]
    ModulusTooLarge(u64),

    #[error("order {d} does not divide p - 1 = {group_order}")]
    OrderDoesNotDivide { d: u64, group_order: u64 },

    #[error("order must be at least 2, got {0}")]
    OrderTooSmall(u64),

    #[error("index {m} is not coprime to order {d}; the character would have order {actual}")]
    IndexNotCoprime { m: u64, d: u64, actual: u64 },

    #[error("input length {got} does not match transform length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent overflow: {0}")]
    Overflow(String),
}
