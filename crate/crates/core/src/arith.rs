//! Exact rationals, primes, places, valuations and norms.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Largest value accepted by [`Prime::new`]. Miller-Rabin with the first
/// seven prime bases is deterministic below 3 474 749 660 383.
pub const PRIME_LIMIT: u64 = 330_000_000_000_000;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `x^e` for any integer exponent; `x` must be nonzero when `e < 0`.
pub fn pow_i(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        Pow::pow(x, e as u64)
    } else {
        Pow::pow(x.recip(), e.unsigned_abs())
    }
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// A prime number small enough for deterministic primality testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if value > PRIME_LIMIT {
            return Err(Error::PrimeTooLarge(value));
        }
        if !is_prime(value) {
            return Err(Error::NotPrime(value));
        }
        Ok(Prime(value))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_biguint(self) -> BigUint {
        BigUint::from(self.0)
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_integer(BigInt::from(self.0))
    }

    /// `p^k` as an integer.
    pub fn pow(self, k: u32) -> BigUint {
        Pow::pow(self.to_biguint(), k)
    }

    /// `p^k` as a rational, for any integer `k`.
    pub fn pow_rational(self, k: i64) -> Rational {
        pow_i(&self.to_rational(), k)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `n < 3.4e14`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factors of `n` in increasing order, by trial division.
pub fn prime_factors(n: &BigUint) -> Result<Vec<Prime>> {
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut d = 2u64;
    while !rest.is_one() && !rest.is_zero() {
        if BigUint::from(d) * BigUint::from(d) > rest {
            let last = u64::try_from(&rest)
                .map_err(|_| Error::InvalidSpec(alloc::format!("cannot factor {n}")))?;
            out.push(Prime::new(last)?);
            break;
        }
        if d > 10_000_000 {
            return Err(Error::InvalidSpec(alloc::format!("cannot factor {n}")));
        }
        if (&rest % d).is_zero() {
            out.push(Prime(d));
            while (&rest % d).is_zero() {
                rest /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    Ok(out)
}

/// A normalized absolute value on Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinite,
    Finite(Prime),
}

impl Place {
    pub fn prime(self) -> Option<Prime> {
        match self {
            Place::Infinite => None,
            Place::Finite(p) => Some(p),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => f.write_str("inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// `ord_p(x)`; `Infinite` exactly for `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinite => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn ord_uint(p: Prime, n: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    if p.0 == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    // Divide by p^(2^j) for growing j, then walk the powers back down.
    let mut powers = alloc::vec![p.to_biguint()];
    let mut rest = n.clone();
    let mut v = 0u64;
    loop {
        let top = powers.last().unwrap();
        let (q, r) = rest.div_rem(top);
        if !r.is_zero() {
            break;
        }
        rest = q;
        v += 1 << (powers.len() - 1);
        let sq = top * top;
        if sq > rest {
            break;
        }
        powers.push(sq);
    }
    for (j, pw) in powers.iter().enumerate().rev() {
        let (q, r) = rest.div_rem(pw);
        if r.is_zero() {
            rest = q;
            v += 1 << j;
        }
    }
    v
}

pub fn ord_int(p: Prime, n: &BigInt) -> Valuation {
    if n.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(ord_uint(p, n.magnitude()) as i64)
    }
}

pub fn ord(p: Prime, x: &Rational) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let num = ord_uint(p, x.numer().magnitude()) as i64;
    let den = ord_uint(p, x.denom().magnitude()) as i64;
    Valuation::Finite(num - den)
}

/// `|x|_p = p^(-ord_p x)`, with `|0|_p = 0`.
pub fn padic_norm(p: Prime, x: &Rational) -> Rational {
    match ord(p, x) {
        Valuation::Infinite => Rational::zero(),
        Valuation::Finite(k) => p.pow_rational(-k),
    }
}

pub fn real_norm(x: &Rational) -> Rational {
    x.abs()
}

pub fn norm(place: Place, x: &Rational) -> Rational {
    match place {
        Place::Infinite => real_norm(x),
        Place::Finite(p) => padic_norm(p, x),
    }
}

/// Sum of the base-`p` digits of `n`.
pub fn digit_sum(p: Prime, mut n: u64) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p.0;
        n /= p.0;
    }
    s
}

/// `ord_p(n!)` via Legendre's formula `(n - s_p(n)) / (p - 1)`.
pub fn factorial_valuation(p: Prime, n: u64) -> Result<u64> {
    let diff = n - digit_sum(p, n);
    if diff % (p.0 - 1) != 0 {
        return Err(Error::Internal(alloc::format!(
            "{} - s_{}({}) not divisible by {}",
            n,
            p,
            n,
            p.0 - 1
        )));
    }
    Ok(diff / (p.0 - 1))
}

/// Smallest integer `>= x`.
pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Compare `|x|_p` against `p^(-t)` without leaving the rationals:
/// `|x|_p < p^(-t)` iff `ord_p(x) > t`.
pub fn compare_norm_to_power(p: Prime, x: &Rational, t: &Rational) -> Ordering {
    match ord(p, x) {
        Valuation::Infinite => Ordering::Less,
        Valuation::Finite(w) => t.cmp(&int(w)),
    }
}
