use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Every operation is defined on positive integers only.
    #[error("input must be a positive integer, got 0")]
    ZeroInput,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid cyclic order {0}: orders must be at least 1")]
    InvalidOrder(u64),

    #[error("invalid modulus {0}: moduli must be at least 2")]
    InvalidModulus(u64),

    #[error("list length {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("empty input list")]
    EmptyInput,

    /// A division in a product expansion left a remainder.
    #[error("non-exact division in {context}: {numerator} / {denominator}")]
    InexactDivision {
        context: &'static str,
        numerator: u128,
        denominator: u128,
    },

    #[error("{needed} exceeds the bound {bound}")]
    BoundExceeded { needed: u64, bound: u64 },

    #[error("order profile is inconsistent with any abelian group: {0}")]
    InconsistentProfile(String),

    #[error("cannot parse group decomposition: {0}")]
    Parse(String),
}
