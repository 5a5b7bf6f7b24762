use alloc::string::String;

use crate::arith::{Place, Rational};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} exceeds the deterministic primality bound")]
    PrimeTooLarge(u64),
    #[error("p-adic operands over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: no significant digits remain")]
    PrecisionExhausted,
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("no root in the disc |y - 1| < 1: {0}")]
    NoRoot(String),
    #[error("wild case unsupported: p = {p} divides s = {s}")]
    WildCase { p: u64, s: u64 },
    #[error("convergence not proven at place {place}: {reason}")]
    NotProvenConvergent { place: Place, reason: String },
    #[error("depth exhausted: {needed} terms needed, maximum is {max}")]
    DepthExhausted { needed: usize, max: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("x must be nonzero")]
    ZeroArgument,
    #[error("pole: {0} is a nonpositive integer")]
    Pole(Rational),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
