use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected a positive integer, got 0")]
    Zero,
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("{k} is not invertible modulo {d}")]
    NotCoprime { k: u64, d: u64 },
    #[error("{m} does not divide {n}")]
    NotDivisor { m: u64, n: u64 },
    #[error("divisor {m} is not a root stratum (gcd(k, n/m) != 1)")]
    NotRoot { m: u64 },
    #[error("element {x} is out of range for modulus {n}")]
    OutOfRange { x: u64, n: u64 },
    #[error("{what} = {value} exceeds the supported limit {limit}")]
    TooLarge {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("formula not applicable: {0}")]
    NotApplicable(String),
    #[error("2^{m} - 1 is not prime")]
    NotMersennePrime { m: u32 },
    #[error("k must be at least {min}, got {k}")]
    KTooSmall { k: u64, min: u64 },
    #[error("non-integral intermediate value in {0}")]
    NotIntegral(&'static str),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
