//! Power series with rational coefficients, analyzed one place at a time.
//!
//! The limsup in the Cauchy-Hadamard formula cannot be read off finitely many
//! coefficients, so the engine keeps two kinds of radius apart: exact radii
//! supplied by a known [`Family`], and empirical prefix estimates. Only the
//! former (together with a [`TailBound`]) can make a verdict `Proven`.

use alloc::format;
use alloc::string::String;
use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, int, norm, ord, pow_i, Place, Prime, Rational, Valuation};
use crate::binomial;
use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::phi::{self, PhiSpec};
use crate::adele;

pub type CoeffRule = Arc<dyn Fn(usize) -> Rational + Send + Sync>;

/// Known coefficient families; the tag unlocks exact radius formulas and
/// certified tail bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `sum binom(b, n) X^n`.
    Binomial(Rational),
    Phi(PhiSpec),
    Hypergeometric {
        a: Rational,
        b: Rational,
        c: Rational,
    },
    /// `sum X^n / n!`.
    Exponential,
    /// Finitely many nonzero coefficients, all of index `<= degree`.
    Polynomial {
        degree: usize,
    },
    Custom,
}

#[derive(Clone)]
pub struct PowerSeries {
    rule: CoeffRule,
    family: Family,
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerSeries").field("family", &self.family).finish_non_exhaustive()
    }
}

impl PowerSeries {
    pub fn new(family: Family, rule: impl Fn(usize) -> Rational + Send + Sync + 'static) -> Self {
        PowerSeries {
            rule: Arc::new(rule),
            family,
        }
    }

    pub fn custom(rule: impl Fn(usize) -> Rational + Send + Sync + 'static) -> Self {
        Self::new(Family::Custom, rule)
    }

    pub fn polynomial(coeffs: Vec<Rational>) -> Self {
        let degree = coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        let coeffs = Arc::new(coeffs);
        Self::new(Family::Polynomial { degree }, move |n| {
            coeffs.get(n).cloned().unwrap_or_else(Rational::zero)
        })
    }

    pub fn constant(c: Rational) -> Self {
        Self::polynomial(alloc::vec![c])
    }

    pub fn exponential() -> Self {
        Self::new(Family::Exponential, |n| {
            Rational::new(BigInt::one(), BigInt::from(arith::factorial(n as u64)))
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn coeff(&self, n: usize) -> Rational {
        (self.rule)(n)
    }

    /// `a_(n+1) / a_n` as a function of `n`, for families with a term
    /// recurrence, together with the limit of its absolute value.
    fn ratio_step(&self) -> Option<(Box<dyn Fn(usize) -> Rational + '_>, Rational)> {
        match &self.family {
            Family::Binomial(b) => Some((
                Box::new(move |n: usize| (b - int(n as i64)) / int(n as i64 + 1)),
                Rational::one(),
            )),
            Family::Hypergeometric { a, b, c } => Some((
                Box::new(move |n: usize| {
                    let n = int(n as i64);
                    (a + &n) * (b + &n) / ((c + &n) * (&n + Rational::one()))
                }),
                Rational::one(),
            )),
            Family::Exponential => Some((
                Box::new(|n: usize| Rational::new(BigInt::one(), BigInt::from(n + 1))),
                Rational::zero(),
            )),
            _ => None,
        }
    }

    /// The first `len` coefficients, using a term recurrence where the family
    /// has one.
    pub fn prefix(&self, len: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(len);
        match self.ratio_step() {
            Some((step, _)) if len > 0 => {
                let mut cur = self.coeff(0);
                out.push(cur.clone());
                for n in 0..len - 1 {
                    cur = if cur.is_zero() { cur } else { cur * step(n) };
                    out.push(cur.clone());
                }
            }
            _ => out.extend((0..len).map(|n| self.coeff(n))),
        }
        out
    }

    /// Cauchy product, truncated lazily: coefficient `n` is recomputed from
    /// both prefixes on demand.
    pub fn cauchy_product(&self, other: &PowerSeries) -> PowerSeries {
        let f = self.clone();
        let g = other.clone();
        let family = match (&self.family, &other.family) {
            (Family::Polynomial { degree: a }, Family::Polynomial { degree: b }) => {
                Family::Polynomial { degree: a + b }
            }
            _ => Family::Custom,
        };
        PowerSeries::new(family, move |n| {
            (0..=n).map(|k| f.coeff(k) * g.coeff(n - k)).fold(Rational::zero(), |a, b| a + b)
        })
    }

    /// Index beyond which every coefficient vanishes, if the family says so.
    pub fn degree_bound(&self) -> Option<usize> {
        match &self.family {
            Family::Polynomial { degree } => Some(*degree),
            Family::Binomial(b) => binomial::nonnegative_integer(b).map(|k| k as usize),
            Family::Hypergeometric { a, b, .. } => {
                let da = nonpositive_integer(a);
                let db = nonpositive_integer(b);
                match (da, db) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                }
            }
            _ => None,
        }
    }

    /// Radius of convergence from the family formula, if there is one.
    pub fn exact_radius(&self, place: Place) -> Option<RadiusValue> {
        if self.degree_bound().is_some() {
            return Some(RadiusValue::Infinite);
        }
        match (&self.family, place) {
            (Family::Binomial(b), _) => Some(binomial::binomial_radius(b, place).value),
            (Family::Phi(_), _) => Some(RadiusValue::Infinite),
            (Family::Exponential, Place::Infinite) => Some(RadiusValue::Infinite),
            (Family::Exponential, Place::Finite(p)) => {
                Some(RadiusValue::PowerOfPrime(Rational::new(BigInt::one(), BigInt::from(p.get() - 1))))
            }
            (Family::Hypergeometric { a, b, c }, _) => adele::hypergeometric_radius(a, b, c, place),
            _ => None,
        }
    }

    /// A bound `ord_p(a_n x^n) >= slope * n - offset` valid for every `x` with
    /// `ord_p(x) >= w` and every `n >= start`, with `slope > 0`.
    pub fn tail_bound(&self, p: Prime, w: i64) -> Option<TailBound> {
        if let Some(d) = self.degree_bound() {
            return Some(TailBound::vacuous(d + 1));
        }
        match &self.family {
            Family::Binomial(b) => binomial::tail_bound(b, p, w),
            Family::Phi(spec) => phi::tail_bound(spec, p, w),
            Family::Exponential => {
                let slope = int(w) - Rational::new(BigInt::one(), BigInt::from(p.get() - 1));
                slope.is_positive().then(|| TailBound {
                    start: 0,
                    slope,
                    offset: Rational::zero(),
                })
            }
            Family::Hypergeometric { a, b, c } => adele::hypergeometric_tail_bound(a, b, c, p, w),
            _ => None,
        }
    }

    /// Witness that the terms do not tend to zero at a boundary point.
    fn boundary_divergence(&self, p: Prime, x: &Rational) -> Option<String> {
        match &self.family {
            Family::Binomial(b) => binomial::boundary_divergence(b, p, x),
            Family::Exponential if p.get() == 2 && ord(p, x) == Valuation::Finite(1) => Some(String::from(
                "ord_2(x^n/n!) = s_2(n), which equals 1 at every n = 2^j, so terms do not tend to 0",
            )),
            _ => None,
        }
    }
}

fn nonpositive_integer(x: &Rational) -> Option<usize> {
    if x.is_integer() && !x.is_positive() {
        usize::try_from(-x.to_integer()).ok()
    } else {
        None
    }
}

/// Certified lower bound on term valuations; see [`PowerSeries::tail_bound`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailBound {
    pub start: usize,
    pub slope: Rational,
    pub offset: Rational,
}

impl TailBound {
    /// For series whose terms vanish from `start` on.
    pub fn vacuous(start: usize) -> Self {
        TailBound {
            start,
            slope: Rational::one(),
            offset: Rational::zero(),
        }
    }

    /// Smallest index from which every term has valuation `>= k`.
    pub fn index_for(&self, k: i64) -> usize {
        let need = (int(k) + &self.offset) / &self.slope;
        let n = arith::ceil(&need);
        let n = if n.is_negative() { 0 } else { usize::try_from(n).unwrap_or(usize::MAX) };
        n.max(self.start)
    }

    pub fn bound_at(&self, n: usize) -> Rational {
        &self.slope * int(n as i64) - &self.offset
    }
}

/// Radius of convergence. At a finite place `PowerOfPrime(t)` is `p^(-t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RadiusValue {
    Zero,
    Infinite,
    PowerOfPrime(Rational),
    Real(Rational),
}

impl RadiusValue {
    /// Ordering of `|x|_place` against the radius.
    pub fn compare_norm(&self, place: Place, x: &Rational) -> Ordering {
        if x.is_zero() {
            return match self {
                RadiusValue::Zero => Ordering::Equal,
                _ => Ordering::Less,
            };
        }
        match (self, place) {
            (RadiusValue::Zero, _) => Ordering::Greater,
            (RadiusValue::Infinite, _) => Ordering::Less,
            (RadiusValue::PowerOfPrime(t), Place::Finite(p)) => arith::compare_norm_to_power(p, x, t),
            (RadiusValue::Real(r), Place::Infinite) => x.abs().cmp(r),
            (RadiusValue::PowerOfPrime(_), Place::Infinite) | (RadiusValue::Real(_), Place::Finite(_)) => {
                panic!("radius does not belong to place {place}")
            }
        }
    }
}

impl fmt::Display for RadiusValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusValue::Zero => f.write_str("0"),
            RadiusValue::Infinite => f.write_str("inf"),
            RadiusValue::PowerOfPrime(t) => write!(f, "p^(-{t})"),
            RadiusValue::Real(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusKind {
    Exact,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    RootTestPrefix,
    RatioTestPrefix,
    FamilyFormula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusEstimate {
    pub place: Place,
    pub kind: RadiusKind,
    pub method: RadiusMethod,
    pub value: RadiusValue,
}

impl RadiusEstimate {
    pub fn exact(place: Place, value: RadiusValue) -> Self {
        RadiusEstimate {
            place,
            kind: RadiusKind::Exact,
            method: RadiusMethod::FamilyFormula,
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    ConvergesProven,
    DivergesProven,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceVerdict {
    pub status: Status,
    pub depth: usize,
    pub witness: String,
    /// Present on `ConvergesProven` at a finite place.
    pub tail: Option<TailBound>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub default_depth: usize,
    pub max_depth: usize,
    pub tolerance: Rational,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            default_depth: 256,
            max_depth: 8192,
            tolerance: Rational::new(BigInt::one(), BigInt::from(10u64.pow(9))),
        }
    }
}

/// Requested accuracy for [`evaluate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// Absolute p-adic precision: the result is exact modulo `p^k`.
    Digits(u32),
    /// Stop real summation once the partial-sum gap drops below this.
    Tolerance(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Padic(PadicNumber),
    /// Tolerance-bounded, not certified.
    Real {
        value: Rational,
        terms: usize,
        tolerance: Rational,
    },
}

/// `|a_n x^n|` at `place`.
pub fn term_norm(f: &PowerSeries, n: usize, x: &Rational, place: Place) -> Rational {
    norm(place, &(f.coeff(n) * pow_i(x, n as i64)))
}

pub fn radius(f: &PowerSeries, place: Place, depth: usize) -> RadiusEstimate {
    if let Some(value) = f.exact_radius(place) {
        return RadiusEstimate::exact(place, value);
    }
    let depth = depth.max(8);
    let coeffs = f.prefix(depth + 1);
    let window: Vec<(usize, &Rational)> = coeffs
        .iter()
        .enumerate()
        .skip((3 * depth / 4).max(1))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    match place {
        Place::Finite(p) => {
            // 1/R = limsup p^(-ord a_n / n), so t = limsup -ord(a_n)/n.
            let t = window
                .iter()
                .map(|(n, c)| {
                    let v = ord(p, c).finite().expect("nonzero");
                    Rational::new(BigInt::from(-v), BigInt::from(*n))
                })
                .max();
            RadiusEstimate {
                place,
                kind: RadiusKind::Empirical,
                method: RadiusMethod::RootTestPrefix,
                value: t.map_or(RadiusValue::Infinite, RadiusValue::PowerOfPrime),
            }
        }
        Place::Infinite => {
            let ratios: Vec<Rational> = window
                .windows(2)
                .filter(|w| w[1].0 == w[0].0 + 1)
                .map(|w| (w[1].1 / w[0].1).abs())
                .collect();
            if let (Some(lo), Some(hi), Some(last)) =
                (ratios.iter().min(), ratios.iter().max(), ratios.last())
            {
                // stabilized: spread within an eighth of the largest ratio
                if (hi - lo) * int(8) <= *hi {
                    return RadiusEstimate {
                        place,
                        kind: RadiusKind::Empirical,
                        method: RadiusMethod::RatioTestPrefix,
                        value: if last.is_zero() {
                            RadiusValue::Infinite
                        } else {
                            RadiusValue::Real(last.recip())
                        },
                    };
                }
            }
            let value = match window.last() {
                None => RadiusValue::Infinite,
                Some((n, c)) => {
                    let root = |v: &BigInt| v.magnitude().nth_root(*n as u32);
                    let num = root(c.numer());
                    let den = root(c.denom());
                    if num.is_zero() {
                        RadiusValue::Infinite
                    } else {
                        RadiusValue::Real(Rational::new(BigInt::from(den), BigInt::from(num)))
                    }
                }
            };
            RadiusEstimate {
                place,
                kind: RadiusKind::Empirical,
                method: RadiusMethod::RootTestPrefix,
                value,
            }
        }
    }
}

pub fn converges_at(f: &PowerSeries, x: &Rational, place: Place, depth: usize) -> ConvergenceVerdict {
    let depth = depth.max(8);
    let verdict = |status, witness: String, tail| ConvergenceVerdict {
        status,
        depth,
        witness,
        tail,
    };
    if x.is_zero() {
        return verdict(
            Status::ConvergesProven,
            String::from("x = 0: every term past the constant vanishes"),
            Some(TailBound::vacuous(1)),
        );
    }
    let exact = f.exact_radius(place);
    match place {
        Place::Finite(p) => {
            let w = ord(p, x).finite().expect("nonzero x");
            if let Some(tb) = f.tail_bound(p, w) {
                return verdict(
                    Status::ConvergesProven,
                    format!(
                        "ord_{p}(a_n x^n) >= {} n - {} for all n >= {}",
                        tb.slope, tb.offset, tb.start
                    ),
                    Some(tb),
                );
            }
            match exact {
                Some(r) => match r.compare_norm(place, x) {
                    Ordering::Greater => verdict(
                        Status::DivergesProven,
                        format!("|x|_{p} = {} exceeds the exact radius {r}", norm(place, x)),
                        None,
                    ),
                    Ordering::Equal => match f.boundary_divergence(p, x) {
                        Some(w) => verdict(Status::DivergesProven, w, None),
                        None => verdict(
                            Status::Undetermined,
                            format!("|x|_{p} equals the exact radius {r}; no term certificate"),
                            None,
                        ),
                    },
                    Ordering::Less => verdict(
                        Status::Undetermined,
                        format!("|x|_{p} is inside the exact radius {r} but no tail bound is available"),
                        None,
                    ),
                },
                None => {
                    let est = radius(f, place, depth);
                    let tail_min = (depth / 2..=depth)
                        .filter_map(|n| ord(p, &(f.coeff(n) * pow_i(x, n as i64))).finite())
                        .min();
                    verdict(
                        Status::Undetermined,
                        format!(
                            "empirical radius {} from {depth} terms; smallest term valuation over [{}, {depth}] is {}",
                            est.value,
                            depth / 2,
                            tail_min.map_or(String::from("inf"), |v| format!("{v}"))
                        ),
                        None,
                    )
                }
            }
        }
        Place::Infinite => match exact {
            Some(r) => match r.compare_norm(place, x) {
                Ordering::Less => verdict(
                    Status::ConvergesProven,
                    format!("|x| = {} is inside the exact radius {r}", x.abs()),
                    None,
                ),
                Ordering::Greater => verdict(
                    Status::DivergesProven,
                    format!("|x| = {} exceeds the exact radius {r}", x.abs()),
                    None,
                ),
                Ordering::Equal => verdict(
                    Status::Undetermined,
                    format!("|x| equals the exact radius {r}"),
                    None,
                ),
            },
            None => {
                let est = radius(f, place, depth);
                verdict(
                    Status::Undetermined,
                    format!("empirical radius {} from {depth} terms", est.value),
                    None,
                )
            }
        },
    }
}

fn require_proven(f: &PowerSeries, x: &Rational, place: Place, depth: usize) -> Result<ConvergenceVerdict> {
    let v = converges_at(f, x, place, depth);
    if v.status != Status::ConvergesProven {
        return Err(Error::NotProvenConvergent {
            place,
            reason: v.witness,
        });
    }
    Ok(v)
}

pub fn evaluate(f: &PowerSeries, x: &Rational, place: Place, target: &Target, config: &EngineConfig) -> Result<Evaluation> {
    let verdict = require_proven(f, x, place, config.default_depth)?;
    if x.is_zero() {
        return match (place, target) {
            (Place::Finite(p), Target::Digits(k)) => {
                Ok(Evaluation::Padic(PadicNumber::from_rational_abs(p, &f.coeff(0), i64::from(*k))))
            }
            (Place::Infinite, Target::Tolerance(_)) => Ok(Evaluation::Real {
                value: f.coeff(0),
                terms: 1,
                tolerance: Rational::zero(),
            }),
            _ => Err(Error::InvalidSpec(String::from("target does not match the place"))),
        };
    }
    match (place, target) {
        (Place::Finite(p), Target::Digits(k)) => {
            let k = i64::from(*k);
            let tb = verdict.tail.expect("finite-place proofs carry a tail bound");
            let n = tb.index_for(k);
            if n > config.max_depth {
                return Err(Error::DepthExhausted {
                    needed: n,
                    max: config.max_depth,
                });
            }
            let sum = partial_sum(f, x, n);
            Ok(Evaluation::Padic(PadicNumber::from_rational_abs(p, &sum, k)))
        }
        (Place::Infinite, Target::Tolerance(tol)) => real_sum(f, x, tol, config),
        (Place::Infinite, Target::Digits(_)) => Err(Error::InvalidSpec(String::from(
            "real evaluation takes a tolerance, not a digit count",
        ))),
        (Place::Finite(_), Target::Tolerance(_)) => Err(Error::InvalidSpec(String::from(
            "p-adic evaluation takes a digit count, not a tolerance",
        ))),
    }
}

/// `sum_{n < len} a_n x^n`, exactly.
pub fn partial_sum(f: &PowerSeries, x: &Rational, len: usize) -> Rational {
    let mut acc = Rational::zero();
    let mut xn = Rational::one();
    for c in f.prefix(len) {
        if !c.is_zero() {
            acc += c * &xn;
        }
        xn *= x;
    }
    acc
}

fn real_sum(f: &PowerSeries, x: &Rational, tol: &Rational, config: &EngineConfig) -> Result<Evaluation> {
    if let Some(d) = f.degree_bound() {
        return Ok(Evaluation::Real {
            value: partial_sum(f, x, d + 1),
            terms: d + 1,
            tolerance: Rational::zero(),
        });
    }
    if let Some((step, limit)) = f.ratio_step() {
        return real_sum_fixed(f, &*step, &limit, x, tol, config);
    }
    let mut acc = Rational::zero();
    let mut xn = Rational::one();
    let mut prev: Option<Rational> = None;
    let mut n = 0usize;
    let mut coeffs = f.prefix(64).into_iter();
    let mut fetched = 64usize;
    while n < config.max_depth {
        let c = match coeffs.next() {
            Some(c) => c,
            None => {
                let next = (fetched * 2).min(config.max_depth);
                let all = f.prefix(next);
                coeffs = all.into_iter().skip(fetched).collect::<Vec<_>>().into_iter();
                fetched = next;
                continue;
            }
        };
        let term = c * &xn;
        xn *= x;
        n += 1;
        if term.is_zero() {
            continue;
        }
        let size = term.abs();
        acc += term;
        if let Some(p) = prev.replace(size.clone()) {
            // ratio of consecutive nonzero terms stands in for the tail
            let rho = &size / &p;
            if rho < Rational::one() && size < *tol {
                let tail = &size * &rho / (Rational::one() - &rho);
                if tail < *tol {
                    return Ok(Evaluation::Real {
                        value: acc,
                        terms: n,
                        tolerance: tol.clone(),
                    });
                }
            }
        }
    }
    Err(Error::DepthExhausted {
        needed: config.max_depth + 1,
        max: config.max_depth,
    })
}

/// Real summation in fixed point with `bits` fractional bits, far below the
/// tolerance, so operand sizes stay bounded however many terms are needed.
/// The stopping rule bounds the tail geometrically by the larger of the
/// current term ratio and its limit.
fn real_sum_fixed(
    f: &PowerSeries,
    step: &dyn Fn(usize) -> Rational,
    limit: &Rational,
    x: &Rational,
    tol: &Rational,
    config: &EngineConfig,
) -> Result<Evaluation> {
    let tol_bits = (tol.denom().bits() + 1).saturating_sub(tol.numer().bits());
    let depth_bits = u64::from(usize::BITS - config.max_depth.leading_zeros());
    let bits = tol_bits + depth_bits + 32;
    let scale = BigInt::one() << bits;
    let fixed = |r: Rational| r.round().to_integer();
    let tol_fixed = tol * Rational::from_integer(scale.clone());
    let floor_ratio = limit * x.abs();
    let one = Rational::one();
    let mut t = fixed(f.coeff(0) * Rational::from_integer(scale.clone()));
    let mut acc = BigInt::zero();
    for n in 0..config.max_depth {
        acc += &t;
        let r = step(n) * x;
        let rho = r.abs().max(floor_ratio.clone());
        let size = Rational::from_integer(t.abs());
        if size < tol_fixed && rho < one && &size * &rho / (&one - &rho) < tol_fixed {
            return Ok(Evaluation::Real {
                value: Rational::new(acc, scale),
                terms: n + 1,
                tolerance: tol.clone(),
            });
        }
        t = fixed(Rational::from_integer(t) * r);
    }
    Err(Error::DepthExhausted {
        needed: config.max_depth + 1,
        max: config.max_depth,
    })
}

/// Evaluate at a truncated p-adic point. The result's precision is the
/// smaller of `k` and what the uncertainty in `x` allows.
pub fn evaluate_at_padic(f: &PowerSeries, x: &PadicNumber, k: u32, config: &EngineConfig) -> Result<PadicNumber> {
    let p = x.prime();
    let k = i64::from(k);
    let Some(w) = x.valuation_lower_bound() else {
        return Ok(PadicNumber::from_rational_abs(p, &f.coeff(0), k));
    };
    let place = Place::Finite(p);
    let tb = f.tail_bound(p, w).ok_or_else(|| Error::NotProvenConvergent {
        place,
        reason: format!("no tail bound for points with ord_{p}(x) >= {w}"),
    })?;
    let n = tb.index_for(k);
    if n > config.max_depth {
        return Err(Error::DepthExhausted {
            needed: n,
            max: config.max_depth,
        });
    }
    let r = x.to_rational();
    let sum = partial_sum(f, &r, n);
    // f(r + e) - f(r) has valuation >= A - w + min_{n>=1} (ord a_n + n w).
    let abs = x.absolute_precision().expect("not exact zero");
    let mut low = tb.bound_at(tb.start.max(1));
    for (i, c) in f.prefix(tb.start).iter().enumerate().skip(1) {
        if let Valuation::Finite(v) = ord(p, c) {
            let b = int(v + w * i as i64);
            if b < low {
                low = b;
            }
        }
    }
    let limit = int(abs - w) + low;
    let limit = limit.floor().to_integer();
    let limit = i64::try_from(limit).unwrap_or(i64::MAX);
    Ok(PadicNumber::from_rational_abs(p, &sum, k.min(limit)))
}

pub fn coefficients_equal(f: &PowerSeries, g: &PowerSeries, degree: usize) -> bool {
    f.prefix(degree + 1) == g.prefix(degree + 1)
}
