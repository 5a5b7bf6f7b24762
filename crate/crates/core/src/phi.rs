//! The factorial-weighted series
//!
//! ```text
//! phi(x) = sum_n eps^n (m!)^(m - 1) / (q + (m!)^E(n)) x^m,   m = gamma n + delta,
//! ```
//!
//! with `E(n) = N m` or `E(n) = P(n) m`, and its telescoping summation
//! formula.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::arith::{self, int, norm, ord, pow_i, Place, Prime, Rational, Valuation};
use crate::error::{Error, Result};
use crate::series::{ConvergenceVerdict, Family, PowerSeries, RadiusEstimate, RadiusValue, Status, TailBound};

/// How large the denominator's factorial power grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExponentRule {
    /// `E(n) = N m` with `N >= 2`.
    Multiplier(u64),
    /// `E(n) = P(n) m`; coefficients from the constant term up, with
    /// `P(n) >= 2` for all `n >= 0`.
    Polynomial(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiSpec {
    gamma: u64,
    delta: u64,
    negative: bool,
    q: Rational,
    rule: ExponentRule,
}

impl PhiSpec {
    pub fn new(gamma: u64, delta: u64, epsilon: i8, q: Rational, rule: ExponentRule) -> Result<Self> {
        if gamma == 0 {
            return Err(Error::InvalidSpec(String::from("gamma must be positive")));
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::InvalidSpec(String::from("epsilon must be +1 or -1")));
        }
        if !q.is_positive() {
            return Err(Error::InvalidSpec(format!("q = {q} must be positive")));
        }
        match &rule {
            ExponentRule::Multiplier(n) if *n < 2 => {
                return Err(Error::InvalidSpec(format!("N = {n} must be at least 2")));
            }
            ExponentRule::Polynomial(c) => check_polynomial(c)?,
            _ => {}
        }
        Ok(PhiSpec {
            gamma,
            delta,
            negative: epsilon < 0,
            q,
            rule,
        })
    }

    pub fn multiplier(gamma: u64, delta: u64, epsilon: i8, q: Rational, n: u64) -> Result<Self> {
        Self::new(gamma, delta, epsilon, q, ExponentRule::Multiplier(n))
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn epsilon(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn rule(&self) -> &ExponentRule {
        &self.rule
    }

    /// The power of `x` carried by the `n`-th term.
    pub fn power(&self, n: u64) -> u64 {
        self.gamma * n + self.delta
    }

    fn multiplier_at(&self, n: u64) -> u64 {
        match &self.rule {
            ExponentRule::Multiplier(k) => *k,
            ExponentRule::Polynomial(c) => {
                u64::try_from(eval_poly(c, n)).expect("validated to be at least 2")
            }
        }
    }

    fn denominator(&self, m: u64, mult: u64) -> Rational {
        let f = arith::factorial(m);
        &self.q + Rational::from_integer(BigInt::from(num_traits::pow(f, (mult * m) as usize)))
    }

    fn require_multiplier(&self) -> Result<u64> {
        match self.rule {
            ExponentRule::Multiplier(n) => Ok(n),
            ExponentRule::Polynomial(_) => Err(Error::Precondition(String::from(
                "the summation formula needs a constant multiplier N",
            ))),
        }
    }
}

fn eval_poly(c: &[i64], n: u64) -> i128 {
    c.iter().rev().fold(0i128, |acc, &k| acc * n as i128 + k as i128)
}

fn check_polynomial(c: &[i64]) -> Result<()> {
    let lead = c.iter().rposition(|k| *k != 0);
    match lead {
        Some(d) if d >= 1 && c[d] > 0 => {}
        _ => {
            return Err(Error::InvalidSpec(String::from(
                "P must have degree at least 1 and a positive leading coefficient",
            )))
        }
    }
    // Past n0 the leading term dominates the rest, so P is increasing and
    // a check on [0, n0] covers every n.
    let d = lead.unwrap_or(0);
    let rest: i128 = c[..d].iter().map(|k| (*k as i128).abs()).sum();
    let n0 = (rest + 2) as u64;
    for n in 0..=n0.min(10_000) {
        if eval_poly(c, n) < 2 {
            return Err(Error::InvalidSpec(format!("P({n}) < 2")));
        }
    }
    Ok(())
}

/// Rising factorial `a (a + 1) ... (a + m - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pochhammer {
    pub base: Rational,
    pub length: u64,
}

impl Pochhammer {
    pub fn new(base: Rational, length: u64) -> Self {
        Pochhammer { base, length }
    }

    pub fn value(&self) -> Rational {
        (0..self.length).fold(Rational::one(), |acc, k| acc * (&self.base + int(k as i64)))
    }
}

/// `(power of x, coefficient)` of the `n`-th term.
pub fn phi_coefficient(spec: &PhiSpec, n: u64) -> (u64, Rational) {
    let m = spec.power(n);
    let c = factorial_power(m, m as i64 - 1) / spec.denominator(m, spec.multiplier_at(n));
    let c = if spec.negative && n % 2 == 1 { -c } else { c };
    (m, c)
}

fn factorial_power(m: u64, e: i64) -> Rational {
    pow_i(&Rational::from_integer(BigInt::from(arith::factorial(m))), e)
}

pub fn phi_series(spec: PhiSpec) -> PowerSeries {
    let s = spec.clone();
    PowerSeries::new(Family::Phi(spec), move |k| {
        let k = k as u64;
        if k < s.delta || (k - s.delta) % s.gamma != 0 {
            Rational::zero()
        } else {
            phi_coefficient(&s, (k - s.delta) / s.gamma).1
        }
    })
}

pub fn phi_radius(place: Place) -> RadiusEstimate {
    RadiusEstimate::exact(place, RadiusValue::Infinite)
}

/// For `m >= p` with `E ord(m!) > ord(q)` the denominator has valuation
/// `ord(q)`, and then
/// `ord(term) >= (m - 1)(m/p - 1) + m w - ord(q) >= m - 1 - ord(q)`
/// once `m >= p (2 + 1/p - w)`.
pub(crate) fn tail_bound(spec: &PhiSpec, p: Prime, w: i64) -> Option<TailBound> {
    let pp = p.get() as i64;
    let oq = ord(p, &spec.q).finite().expect("q > 0");
    let mut m1 = if oq < 0 { 0 } else { pp };
    // E >= 2m and ord(m!) >= floor(m/p)
    while 2 * m1 * (m1 / pp) <= oq {
        m1 += 1;
    }
    let m2 = 2 * pp + 1 - pp * w;
    let start = m1.max(m2).max(1);
    Some(TailBound {
        start: usize::try_from(start).ok()?,
        slope: Rational::one(),
        offset: int(oq + 1),
    })
}

/// `-(delta!)^(delta - 1) / (q + (delta!)^(N delta))`.
pub fn summation_rhs(spec: &PhiSpec) -> Result<Rational> {
    let n = spec.require_multiplier()?;
    Ok(-boundary_weight(spec, 0, n))
}

/// `A_k = (m!)^(m - 1) / (q + (m!)^(N m))` at `m = gamma k + delta`.
fn boundary_weight(spec: &PhiSpec, k: u64, n: u64) -> Rational {
    let m = spec.power(k);
    factorial_power(m, m as i64 - 1) / spec.denominator(m, n)
}

/// The `n`-th term of the summation formula's left side, computed from the
/// bracketed form with its Pochhammer factor.
pub fn summation_term(spec: &PhiSpec, x: &Rational, n: u64) -> Result<Rational> {
    let big_n = spec.require_multiplier()?;
    let g = spec.gamma;
    let m = spec.power(n);
    let m_next = spec.power(n + 1);
    let e = m as i64 - 1;
    let poch = Pochhammer::new(int(m as i64 + 1), g).value();
    let next_fact = Rational::from_integer(BigInt::from(arith::factorial(m_next)));
    let first = pow_i(&next_fact, g as i64) * pow_i(&poch, e) / spec.denominator(m_next, big_n) * pow_i(x, g as i64);
    let second = spec.denominator(m, big_n).recip();
    Ok(factorial_power(m, e) * pow_i(x, (g * n) as i64) * (first - second))
}

/// `(partial, remainder)` with `partial` the sum of the first `M + 1` terms
/// and `remainder = -A_(M+1) x^(gamma (M + 1))`, the boundary term the
/// telescoping leaves behind.
pub fn summation_lhs_partial(spec: &PhiSpec, x: &Rational, m: u64) -> Result<(Rational, Rational)> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let mut partial = Rational::zero();
    for n in 0..=m {
        partial += summation_term(spec, x, n)?;
    }
    Ok((partial, summation_remainder(spec, x, m)?))
}

pub fn summation_remainder(spec: &PhiSpec, x: &Rational, m: u64) -> Result<Rational> {
    let n = spec.require_multiplier()?;
    Ok(-boundary_weight(spec, m + 1, n) * pow_i(x, (spec.gamma * (m + 1)) as i64))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummationReport {
    pub verdict: ConvergenceVerdict,
    pub rhs: Rational,
    /// Remainder after `depth + 1` terms.
    pub remainder: Rational,
    /// `|remainder|` at the place.
    pub remainder_norm: Rational,
    /// Index of the first `M` where the exact identity failed, if any.
    pub identity_failure: Option<u64>,
}

/// Check the exact identity for every `M <= depth`, then decide whether the
/// remainder tends to 0 at `place`. At infinity `tolerance` is the bar the
/// final remainder must clear.
pub fn summation_verify(
    spec: &PhiSpec,
    x: &Rational,
    place: Place,
    depth: u64,
    tolerance: &Rational,
) -> Result<SummationReport> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let rhs = summation_rhs(spec)?;
    let mut partial = Rational::zero();
    let mut identity_failure = None;
    let mut remainder = Rational::zero();
    for m in 0..=depth {
        partial += summation_term(spec, x, m)?;
        remainder = summation_remainder(spec, x, m)?;
        if identity_failure.is_none() && &partial + &remainder != rhs {
            identity_failure = Some(m);
        }
    }
    let remainder_norm = norm(place, &remainder);
    let (status, witness) = match (identity_failure, place) {
        (Some(m), _) => (
            Status::Undetermined,
            format!("partial + remainder differs from the closed form at M = {m}"),
        ),
        (None, Place::Finite(p)) => {
            // remainder = -(phi term of degree m) / x^delta
            let w = ord(p, x).finite().expect("x != 0");
            let tb = tail_bound(spec, p, w).expect("always available");
            let shift = w * spec.delta as i64;
            let v = match ord(p, &remainder) {
                Valuation::Finite(v) => format!("{v}"),
                Valuation::Infinite => String::from("inf"),
            };
            (
                Status::ConvergesProven,
                format!(
                    "identity exact for M <= {depth}; ord_{p}(remainder) >= m - {} - {shift} for m = gamma(M+1)+delta >= {}; \
                     ord_{p} at M = {depth} is {v}",
                    tb.offset, tb.start
                ),
            )
        }
        (None, Place::Infinite) => {
            if remainder_norm < *tolerance {
                (
                    Status::ConvergesProven,
                    format!(
                        "identity exact for M <= {depth}; |A_m| <= (m!)^-((N-1) m + 1) forces the remainder to 0, \
                         and |remainder| = {remainder_norm} < {tolerance} at M = {depth}"
                    ),
                )
            } else {
                (
                    Status::Undetermined,
                    format!("identity exact for M <= {depth}; |remainder| = {remainder_norm} has not reached {tolerance}"),
                )
            }
        }
    };
    Ok(SummationReport {
        verdict: ConvergenceVerdict {
            status,
            depth: depth as usize,
            witness,
            tail: None,
        },
        rhs,
        remainder,
        remainder_norm,
        identity_failure,
    })
}

/// Both sides of
/// `((2g+d)!)^g (g+d+1)_g^(g+d-1) ((g+d)!)^(g+d-1) = ((2g+d)!)^(2g+d-1)`.
pub fn product_identity(gamma: u64, delta: u64) -> (BigUint, BigUint) {
    let g = gamma;
    let d = delta;
    let f2 = arith::factorial(2 * g + d);
    let f1 = arith::factorial(g + d);
    let poch = (g + d + 1..=2 * g + d).fold(BigUint::one(), |acc, k| acc * k);
    let e = (g + d).saturating_sub(1) as usize;
    let lhs = num_traits::pow(f2.clone(), g as usize) * num_traits::pow(poch, e) * num_traits::pow(f1, e);
    let rhs = num_traits::pow(f2, (2 * g + d).saturating_sub(1) as usize);
    (lhs, rhs)
}
