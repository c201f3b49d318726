use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order must exceed 1 (got {0})")]
    OrderTooSmall(u32),
    #[error("degenerate root order: characteristic {characteristic} divides {order}")]
    DegenerateOrder { characteristic: u64, order: u32 },
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("cyclotomic factor search over F_{characteristic} exceeds the candidate limit")]
    FieldTooLarge { characteristic: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("out of range: binomial ({r}, {s})")]
    OutOfRange { r: i64, s: i64 },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not dualizable input: {0}")]
    NotDualizable(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("cohomology solve failed at degree {0}")]
    CohomologySolve(usize),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
