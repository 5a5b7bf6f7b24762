//! Truncated p-adic numbers and Hensel lifting.
//!
//! A [`PadicNumber`] is `p^v * u + O(p^(v + r))` with `u` a unit modulo
//! `p^r`. `r` is the *relative* precision and `v + r` the *absolute*
//! precision. Two kinds of zero exist: the exact zero, produced only by
//! embedding the rational `0`, and the zero sentinel `O(p^A)`, produced when
//! cancellation leaves no significant digit.
//!
//! Precision propagation:
//!
//! | op        | result                                                       |
//! |-----------|--------------------------------------------------------------|
//! | `a +- b`  | absolute precision `min(A_a, A_b)`, valuation recomputed     |
//! | `a * b`   | valuation `v_a + v_b`, relative precision `min(r_a, r_b)`    |
//! | `a / b`   | valuation `v_a - v_b`, relative precision `min(r_a, r_b)`    |
//!
//! Dividing by the exact zero is [`Error::DivisionByZero`]; dividing by the
//! zero sentinel is [`Error::PrecisionExhausted`].
//!
//! # Digit strings
//!
//! `Display` renders the base-`p` digits known to the stated precision, most
//! significant first, as decimal numbers separated by single spaces:
//!
//! ```text
//! …d_{A-1} … d_1 d_0 . d_{-1} … d_v (base p) + O(p^A)
//! ```
//!
//! The integer part lists positions `A-1` down to `0` (omitted when
//! `A <= 0`) and is glued to the leading `…`. The fractional part lists
//! positions `min(A, 0) - 1` down to `v` and is omitted when `v >= 0`. The
//! exact zero renders as `0`. For example `-6` in `Q_7` at precision 4 is
//! `…6 6 6 1 . (base 7) + O(7^4)` and `1/5` in `Q_5` at precision 2 is
//! `…0 . 1 (base 5) + O(5^1)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{ord, ord_uint, Prime, Rational, Valuation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNumber {
    prime: Prime,
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Zero,
    Sentinel {
        abs_precision: i64,
    },
    Unit {
        valuation: i64,
        unit: BigUint,
        precision: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// `x mod p^k` for a rational whose denominator is prime to `p`.
pub(crate) fn residue(x: &Rational, p: Prime, k: u32) -> BigUint {
    let modulus = BigInt::from(p.pow(k));
    let den = x.denom().mod_floor(&modulus);
    let inv = den
        .modinv(&modulus)
        .expect("denominator must be prime to p");
    (x.numer() * inv)
        .mod_floor(&modulus)
        .to_biguint()
        .expect("mod_floor is nonnegative")
}

fn to_usize_shift(k: i64) -> u32 {
    u32::try_from(k).expect("precision window out of range")
}

impl PadicNumber {
    pub fn exact_zero(prime: Prime) -> Self {
        PadicNumber { prime, repr: Repr::Zero }
    }

    /// `O(p^abs_precision)`.
    pub fn zero_sentinel(prime: Prime, abs_precision: i64) -> Self {
        PadicNumber {
            prime,
            repr: Repr::Sentinel { abs_precision },
        }
    }

    /// Embed `x` with `precision` significant digits.
    pub fn from_rational(prime: Prime, x: &Rational, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let v = match ord(prime, x) {
            Valuation::Infinite => return Ok(Self::exact_zero(prime)),
            Valuation::Finite(v) => v,
        };
        let unit_part = x / prime.pow_rational(v);
        Ok(PadicNumber {
            prime,
            repr: Repr::Unit {
                valuation: v,
                unit: residue(&unit_part, prime, precision),
                precision,
            },
        })
    }

    /// Embed `x` known modulo `p^abs_precision`.
    pub fn from_rational_abs(prime: Prime, x: &Rational, abs_precision: i64) -> Self {
        match ord(prime, x) {
            Valuation::Infinite => Self::exact_zero(prime),
            Valuation::Finite(v) if v >= abs_precision => Self::zero_sentinel(prime, abs_precision),
            Valuation::Finite(v) => {
                Self::from_rational(prime, x, to_usize_shift(abs_precision - v)).expect("positive precision")
            }
        }
    }

    /// The value `digits * p^low` known modulo `p^abs_precision`.
    pub fn from_digits(prime: Prime, digits: &BigUint, low: i64, abs_precision: i64) -> Result<Self> {
        if abs_precision <= low {
            return Err(Error::Precondition(alloc::format!(
                "lowest digit position {low} is not below the precision {abs_precision}"
            )));
        }
        let window = prime.pow(to_usize_shift(abs_precision - low));
        let d = digits % &window;
        if d.is_zero() {
            return Ok(Self::zero_sentinel(prime, abs_precision));
        }
        let t = ord_uint(prime, &d);
        let valuation = low + t as i64;
        let unit = d / prime.pow(t as u32);
        Ok(PadicNumber {
            prime,
            repr: Repr::Unit {
                valuation,
                unit,
                precision: to_usize_shift(abs_precision - valuation),
            },
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn is_zero_sentinel(&self) -> bool {
        matches!(self.repr, Repr::Sentinel { .. })
    }

    /// Valuation of a number with at least one significant digit.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { valuation, .. } => Some(valuation),
            _ => None,
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    pub fn relative_precision(&self) -> Option<u32> {
        match self.repr {
            Repr::Unit { precision, .. } => Some(precision),
            _ => None,
        }
    }

    /// `None` for the exact zero, which is known to every precision.
    pub fn absolute_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Sentinel { abs_precision } => Some(abs_precision),
            Repr::Unit {
                valuation,
                precision,
                ..
            } => Some(valuation + precision as i64),
        }
    }

    /// Lower bound on the valuation: exact for numbers with significant
    /// digits, `A` for `O(p^A)`, `None` for the exact zero.
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Sentinel { abs_precision } => Some(abs_precision),
            Repr::Unit { valuation, .. } => Some(valuation),
        }
    }

    /// `|x|_p`, unknown for the zero sentinel.
    pub fn norm(&self) -> Option<Rational> {
        match self.repr {
            Repr::Zero => Some(Rational::zero()),
            Repr::Sentinel { .. } => None,
            Repr::Unit { valuation, .. } => Some(self.prime.pow_rational(-valuation)),
        }
    }

    /// The canonical representative `p^v * u` (zero for both zeros).
    pub fn to_rational(&self) -> Rational {
        match &self.repr {
            Repr::Unit { valuation, unit, .. } => {
                Rational::from_integer(BigInt::from(unit.clone())) * self.prime.pow_rational(*valuation)
            }
            _ => Rational::zero(),
        }
    }

    /// Base-`p` digit at `position`, if known.
    pub fn digit(&self, position: i64) -> Option<u64> {
        match &self.repr {
            Repr::Zero => Some(0),
            Repr::Sentinel { abs_precision } => (position < *abs_precision).then_some(0),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                if position >= valuation + *precision as i64 {
                    None
                } else if position < *valuation {
                    Some(0)
                } else {
                    let shifted = unit / self.prime.pow((position - valuation) as u32);
                    let d = shifted % self.prime.get();
                    Some(u64::try_from(&d).expect("digit below p"))
                }
            }
        }
    }

    /// Reduce to absolute precision `abs` if that is coarser.
    pub fn truncate(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Sentinel { abs_precision } => Self::zero_sentinel(self.prime, abs.min(*abs_precision)),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                if abs >= valuation + *precision as i64 {
                    self.clone()
                } else if abs <= *valuation {
                    Self::zero_sentinel(self.prime, abs)
                } else {
                    let r = (abs - valuation) as u32;
                    PadicNumber {
                        prime: self.prime,
                        repr: Repr::Unit {
                            valuation: *valuation,
                            unit: unit % self.prime.pow(r),
                            precision: r,
                        },
                    }
                }
            }
        }
    }

    fn check_prime(&self, rhs: &Self) -> Result<()> {
        if self.prime != rhs.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), rhs.prime.get()));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => PadicNumber {
                prime: self.prime,
                repr: Repr::Unit {
                    valuation: *valuation,
                    unit: self.prime.pow(*precision) - unit,
                    precision: *precision,
                },
            },
            _ => self.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_prime(rhs)?;
        let p = self.prime;
        match (&self.repr, &rhs.repr) {
            (Repr::Zero, _) => Ok(rhs.clone()),
            (_, Repr::Zero) => Ok(self.clone()),
            (Repr::Sentinel { abs_precision: a }, Repr::Sentinel { abs_precision: b }) => {
                Ok(Self::zero_sentinel(p, *a.min(b)))
            }
            (Repr::Sentinel { abs_precision }, _) => Ok(rhs.truncate(*abs_precision)),
            (_, Repr::Sentinel { abs_precision }) => Ok(self.truncate(*abs_precision)),
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    ..
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    ..
                },
            ) => {
                let abs = self.absolute_precision().unwrap().min(rhs.absolute_precision().unwrap());
                let low = *va.min(vb);
                let window = p.pow((abs - low) as u32);
                let sum = ua * p.pow((va - low) as u32) + ub * p.pow((vb - low) as u32);
                Self::from_digits(p, &(sum % window), low, abs)
            }
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_prime(rhs)?;
        let p = self.prime;
        Ok(match (&self.repr, &rhs.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Self::exact_zero(p),
            (Repr::Sentinel { abs_precision: a }, Repr::Sentinel { abs_precision: b }) => {
                Self::zero_sentinel(p, a + b)
            }
            (Repr::Sentinel { abs_precision }, Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::Sentinel { abs_precision }) => {
                Self::zero_sentinel(p, abs_precision + valuation)
            }
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    precision: ra,
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    precision: rb,
                },
            ) => {
                let r = *ra.min(rb);
                PadicNumber {
                    prime: p,
                    repr: Repr::Unit {
                        valuation: va + vb,
                        unit: (ua * ub) % p.pow(r),
                        precision: r,
                    },
                }
            }
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.check_prime(rhs)?;
        let p = self.prime;
        match (&self.repr, &rhs.repr) {
            (_, Repr::Zero) => Err(Error::DivisionByZero),
            (_, Repr::Sentinel { .. }) => Err(Error::PrecisionExhausted),
            (Repr::Zero, _) => Ok(Self::exact_zero(p)),
            (Repr::Sentinel { abs_precision }, Repr::Unit { valuation, .. }) => {
                Ok(Self::zero_sentinel(p, abs_precision - valuation))
            }
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    precision: ra,
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    precision: rb,
                },
            ) => {
                let r = *ra.min(rb);
                let modulus = p.pow(r);
                let inv = (ub % &modulus)
                    .modinv(&modulus)
                    .ok_or_else(|| Error::Internal(String::from("unit without inverse")))?;
                Ok(PadicNumber {
                    prime: p,
                    repr: Repr::Unit {
                        valuation: va - vb,
                        unit: (ua * inv) % modulus,
                        precision: r,
                    },
                })
            }
        }
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        if e == 0 {
            let r = self.relative_precision().unwrap_or(1);
            return PadicNumber::from_rational(self.prime, &Rational::one(), r);
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// True when the two values agree to their common precision.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        let d = self.sub(other)?;
        Ok(d.is_exact_zero() || d.is_zero_sentinel())
    }

    /// Known digits from most to least significant, with the position of the
    /// first one. Empty for the exact zero.
    fn rendered_digits(&self) -> (Vec<u64>, Vec<u64>) {
        let Some(abs) = self.absolute_precision() else {
            return (Vec::new(), Vec::new());
        };
        let low = self.valuation().unwrap_or(abs).min(0);
        let int_part = (0..abs).rev().map(|i| self.digit(i).unwrap()).collect();
        let frac_top = abs.min(0) - 1;
        let frac_part = (low..=frac_top).rev().map(|i| self.digit(i).unwrap()).collect();
        (int_part, frac_part)
    }
}

/// Apply one of the four field operations.
pub fn arith(op: ArithOp, a: &PadicNumber, b: &PadicNumber) -> Result<PadicNumber> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(abs) = self.absolute_precision() else {
            return f.write_str("0");
        };
        let (int_part, frac_part) = self.rendered_digits();
        f.write_str("…")?;
        for (i, d) in int_part.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(" .")?;
        for d in &frac_part {
            write!(f, " {d}")?;
        }
        write!(f, " (base {p}) + O({p}^{abs})", p = self.prime)
    }
}

/// Solve `Y^s = t` in `Q_p` for the root with `|y - 1|_p < 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselProblem {
    pub prime: Prime,
    pub exponent: u64,
    pub target: Rational,
}

impl HenselProblem {
    pub fn new(prime: Prime, exponent: u64, target: Rational) -> Self {
        HenselProblem {
            prime,
            exponent,
            target,
        }
    }
}

fn pow_mod(base: &BigUint, e: u64, modulus: &BigUint) -> BigUint {
    base.modpow(&BigUint::from(e), modulus)
}

/// Newton lift of the root of `Y^s = t` seeded at `Y = 1`, returned to
/// `precision` digits.
///
/// `s = 1` returns `t` itself. For `p = 2, s = 2` the root exists iff
/// `t ≡ 1 (mod 8)`; both `±y` lie in the disc and the one `≡ 1 (mod 4)` is
/// returned. Any other `p | s` is rejected.
pub fn hensel_root(prob: &HenselProblem, precision: u32) -> Result<PadicNumber> {
    let p = prob.prime;
    let s = prob.exponent;
    let t = &prob.target;
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    if s == 0 {
        return Err(Error::Precondition(String::from("exponent must be positive")));
    }
    if s == 1 {
        return PadicNumber::from_rational(p, t, precision);
    }
    if ord(p, t) != Valuation::Finite(0) {
        return Err(Error::NoRoot(alloc::format!("|{t}|_{p} != 1")));
    }
    if s % p.get() == 0 {
        if p.get() == 2 && s == 2 {
            return hensel_sqrt_2adic(t, precision);
        }
        return Err(Error::WildCase { p: p.get(), s });
    }

    if residue(t, p, 1) != BigUint::one() % p.get() {
        return Err(Error::NoRoot(alloc::format!(
            "{t} is not congruent to 1 mod {p}; any root of Y^{s} = {t} lies outside the disc"
        )));
    }
    let target = precision;
    let mut y = BigUint::one();
    let mut k = 1u32;
    while k < target {
        k = (2 * k).min(target);
        let modulus = p.pow(k);
        let t_k = residue(t, p, k);
        let f = (pow_mod(&y, s, &modulus) + &modulus - t_k) % &modulus;
        let fp = (BigUint::from(s) * pow_mod(&y, s - 1, &modulus)) % &modulus;
        let inv = fp
            .modinv(&modulus)
            .ok_or_else(|| Error::Internal(String::from("derivative not a unit")))?;
        y = (&y + &modulus - (f * inv) % &modulus) % &modulus;
    }
    let modulus = p.pow(target);
    y %= &modulus;
    if pow_mod(&y, s, &modulus) != residue(t, p, target) {
        return Err(Error::Internal(String::from("Newton iterate fails residual check")));
    }
    PadicNumber::from_digits(p, &y, 0, target as i64)
}

fn hensel_sqrt_2adic(t: &Rational, precision: u32) -> Result<PadicNumber> {
    let two = Prime::new(2)?;
    if residue(t, two, 3) != BigUint::one() {
        return Err(Error::NoRoot(alloc::format!(
            "{t} is not congruent to 1 mod 8, so it is not a 2-adic square of a unit"
        )));
    }
    // y^2 ≡ t (mod 2^j), upgraded one bit of j at a time; y is then
    // determined modulo 2^(j-1) up to sign.
    let top = (precision + 1).max(3);
    let t_top = residue(t, two, top);
    let mut y = BigUint::one();
    for j in 3..top {
        let m = two.pow(j + 1);
        if (&y * &y) % &m != &t_top % &m {
            y += two.pow(j - 1);
        }
    }
    let m_top = two.pow(top);
    if (&y % 4u32) == BigUint::from(3u32) {
        y = &m_top - y;
    }
    let y = y % two.pow(precision);
    let check = two.pow(precision + 1);
    if (&y * &y) % &check != &t_top % &check {
        return Err(Error::Internal(String::from("2-adic square root fails residual check")));
    }
    PadicNumber::from_digits(two, &y, 0, precision as i64)
}

impl From<&PadicNumber> for Rational {
    fn from(x: &PadicNumber) -> Rational {
        x.to_rational()
    }
}

/// `n mod p^k` for a signed integer.
pub fn residue_of_int(n: &BigInt, p: Prime, k: u32) -> BigUint {
    residue(&Rational::from_integer(n.clone()), p, k)
}
