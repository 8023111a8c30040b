use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: need {needed} messages, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("value {value} out of range [0, {bound})")]
    OutOfRange { value: u64, bound: u64 },

    #[error("dimension mismatch: tower has m = {tower}, support is over [{support}]")]
    DimensionMismatch { tower: usize, support: usize },

    #[error("{inner} is not a subset of {outer}")]
    NotASubset { inner: String, outer: String },

    #[error("family {family} requires {condition} (a component set would be empty)")]
    EmptyComponent { family: u8, condition: String },

    #[error("weight count {count} not divisible by codeword repetition {repetition}")]
    NonIntegralDivision { count: u64, repetition: u64 },

    #[error("code size {size} is not a power of q = {q}")]
    NonIntegralDimension { size: String, q: u32 },

    #[error("{context} requires {condition}")]
    HypothesisViolated { context: String, condition: String },

    #[error("spectrum has no nonzero weight")]
    ZeroCode,

    #[error("character sum Omega is not a rational integer")]
    NonRationalOmega,

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn hypothesis(context: impl Into<String>, condition: impl Into<String>) -> Self {
        Error::HypothesisViolated {
            context: context.into(),
            condition: condition.into(),
        }
    }
}
