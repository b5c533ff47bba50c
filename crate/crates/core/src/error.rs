use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator divisible by {p}: congruence mod {p}^e is undefined")]
    DenominatorDivisibleByP { p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is below 5")]
    PrimeTooSmall(u64),
    #[error("modulus exponent must be at least 1")]
    ZeroExponent,
    #[error("residues live in different rings: mod {left} vs mod {right}")]
    ModulusMismatch { left: String, right: String },
    #[error("{value} is not a unit mod {modulus}")]
    NotInvertible { value: String, modulus: String },
    #[error("index {requested} exceeds configured cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("independent routes disagree: {0}")]
    InternalMismatch(String),
    #[error("sequence {0} has no closed form")]
    NoClosedForm(String),
    #[error("degenerate arguments: {0}")]
    DegenerateArgs(String),
    #[error("search box has {requested} candidates, budget is {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
