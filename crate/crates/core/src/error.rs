use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is below 2")]
    BadModulus(u64),
    #[error("group of cardinality {cardinality} exceeds the size budget {budget}")]
    OverBudget { cardinality: u128, budget: usize },
    #[error("shape mismatch: expected {expected} residues, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("operands live in different groups")]
    GroupMismatch,
    #[error("value {0} is not on the unit circle")]
    NotUnitModulus(f64),
    #[error("empty set where a nonempty one is required")]
    EmptySet,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("system is not regular")]
    NotRegular,
    #[error("no regular dilate found in [1/2, 1)")]
    RegularityNotFound,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
}
