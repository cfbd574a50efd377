use thiserror::Error;

/// Everything that can go wrong in the workbench.
///
/// Variants fall into three groups that the CLI maps onto distinct exit codes:
/// precondition rejections, budget overruns, and internal consistency failures
/// (an identity that must hold did not, which always signals a bug).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u32),
    #[error("q = {0} is outside the supported range 2..=256")]
    FieldTooLarge(u32),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("modulus {m} must divide q+1 = {q_plus_one}")]
    ModulusMustDivide { m: u32, q_plus_one: u32 },
    #[error("q = {q} is not invertible modulo {m}")]
    QNotInvertible { q: u32, m: u32 },
    #[error("coefficient modulus {0} is not prime")]
    NotPrime(u32),
    #[error("ambient mismatch: expected dimension {expected}, got {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("level mismatch: expected {expected}, got {found}")]
    LevelMismatch { expected: usize, found: usize },
    #[error("ring mismatch: expected Z/{expected}, got Z/{found}")]
    RingMismatch { expected: u32, found: u32 },
    #[error("invalid vector: {0}")]
    InvalidVector(String),
    #[error("vectors are not linearly independent")]
    DependentBasis,
    #[error("cone undefined at level {level}: need 2k+1 <= {available}")]
    ConeUndefined { level: usize, available: usize },
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("cochain is not a cocycle")]
    NotACocycle,
    #[error("level {level} is not below the middle of dimension {n}")]
    NotBelowMiddle { level: usize, n: usize },
    #[error("maximal totally singular dimension is {witt_index}, expected {expected}")]
    WittIndex { witt_index: usize, expected: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("budget exceeded: {what} needs {needed}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        limit: String,
    },
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }

    pub fn is_inconsistency(&self) -> bool {
        matches!(self, Error::Inconsistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
