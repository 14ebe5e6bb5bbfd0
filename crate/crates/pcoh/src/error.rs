//! Error types shared by the low-level arithmetic and elimination code.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FplinalgError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("division by zero in F_p")]
    DivisionByZero,
    #[error("operation requires an odd prime")]
    EvenPrime,
    #[error("matrix entries require modulus < 256, got {0}")]
    ModulusTooLarge(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mixed moduli: {0} vs {1}")]
    MixedModuli(u32, u32),
    #[error("{n}! is not invertible mod {p}")]
    FactorialOutOfRange { n: u32, p: u32 },
    #[error("vector is not in the ambient span")]
    NotInSpan,
    #[error("B is not a subspace of Z: basis vector {index} lies outside span(Z)")]
    NotASubspace { index: usize },
}
