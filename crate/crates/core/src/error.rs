use thiserror::Error;

use crate::weights::AxiomViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("field element {index} out of range for q = {q}")]
    ElementOutOfRange { index: usize, q: usize },

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero has no multiplicative inverse")]
    InverseOfZero,

    #[error("weight table has {found} entries, field has {expected} elements")]
    IncompleteWeightTable { expected: usize, found: usize },

    #[error("weight table violates the weight axioms: {}", format_violations(.0))]
    InvalidWeight(Vec<AxiomViolation>),

    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("operation requires a chain order")]
    NotChain,

    #[error("enumeration of {requested} items exceeds the budget of {limit}")]
    BudgetExceeded { requested: u128, limit: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("construction failed validation: {0}")]
    Contract(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

fn format_violations(v: &[AxiomViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
