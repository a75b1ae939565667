use thiserror::Error;

/// Errors raised by constructors and operations of this crate.
///
/// Verification routines never return these for a failed identity; failures
/// are recorded in a [`crate::report::VerificationReport`] instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lower parameter {parameter} vanishes at summation index {index}")]
    DenominatorZero { parameter: usize, index: usize },

    #[error("gamma function pole at argument {0}")]
    GammaPole(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate grid point {0}")]
    DuplicatePoint(String),

    #[error("grid must contain at least one point")]
    EmptyGrid,

    #[error("weight at node {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("enumeration of {required} subsets exceeds budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("square root of {0} is not representable in this backend")]
    NotRepresentable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
