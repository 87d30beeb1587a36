use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic must be an odd prime, got {0}")]
    CharacteristicTwo(u64),
    #[error("field of order {p}^{s} does not fit the 32-bit element encoding")]
    FieldTooLarge { p: u32, s: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("witt vector with nonzero reduction is not divisible by p")]
    NotDivisibleByP,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("input is not equivariant: {0}")]
    NonEquivariant(String),
    #[error("point is not marked: {0}")]
    UnmarkedPoint(String),
    #[error("singular matrix")]
    Singular,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("field too small: {0}")]
    FieldTooSmall(String),
    #[error("inconsistent splitting data: {0}")]
    SplittingInconsistent(String),
    #[error("routes disagree: {0}")]
    RouteDisagreement(String),
    #[error("out of theory: {0}")]
    OutOfTheory(String),
    #[error("indeterminacy point: {0}")]
    Indeterminacy(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("interpolation failed up to degree bound {bound}: {detail}")]
    InterpolationBound { bound: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
