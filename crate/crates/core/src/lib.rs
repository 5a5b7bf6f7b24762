//! Exact arithmetic over the rationals and their p-adic completions.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over immutable values:
//!
//! * [`arith`]: rationals, primes, places, valuations, norms and Legendre's
//!   factorial formula.
//! * [`padic`]: truncated p-adic numbers with precision tracking and Hensel
//!   lifting of `Y^s = t`.
//! * [`series`]: lazily described power series with rational coefficients,
//!   radius of convergence per place, convergence verdicts and evaluation.
//! * [`binomial`]: the generalized binomial series `(1 + X)^b` and the
//!   rational-sum checks built on it.
//! * [`phi`]: the factorial-weighted series `phi` and its telescoping
//!   summation formula.
//! * [`adele`]: finite-support adeles and ideles, componentwise series
//!   application and the hypergeometric series.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adele;
pub mod arith;
pub mod binomial;
mod error;
pub mod padic;
pub mod phi;
pub mod series;

pub use adele::{Adele, IdeleReport};
pub use arith::{Place, Prime, Rational, Valuation};
pub use error::{Error, Result};
pub use padic::{HenselProblem, PadicNumber};
pub use series::{ConvergenceVerdict, EngineConfig, Family, PowerSeries, RadiusEstimate, Status};
