use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,

    #[error("{what} must be positive")]
    Zero { what: &'static str },

    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),

    #[error("{value} is not an element of Z_{modulus}")]
    OutOfRange { value: u64, modulus: u64 },

    #[error("{element} is not a unit modulo {modulus}")]
    NotAUnit { element: u64, modulus: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u64, u64),

    #[error("empty congruence system")]
    EmptySystem,

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    /// A family parameter violates the construction's precondition.
    #[error("invalid parameters: {0}")]
    Precondition(String),

    /// Should be unreachable for valid inputs.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
