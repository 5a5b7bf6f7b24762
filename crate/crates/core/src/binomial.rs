//! The generalized binomial series `(1 + X)^b = sum binom(b, n) X^n`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, int, ord, padic_norm, pow_i, Place, Prime, Rational, Valuation};
use crate::error::{Error, Result};
use crate::padic::{self, hensel_root, HenselProblem, PadicNumber};
use crate::series::{
    evaluate, EngineConfig, Evaluation, Family, PowerSeries, RadiusEstimate, RadiusValue, TailBound, Target,
};

/// `b (b - 1) ... (b - n + 1) / n!`.
pub fn gen_binom(b: &Rational, n: u64) -> Rational {
    let mut acc = Rational::one();
    for k in 0..n {
        acc = acc * (b - int(k as i64)) / int(k as i64 + 1);
    }
    acc
}

pub fn nonnegative_integer(b: &Rational) -> Option<u64> {
    if b.is_integer() && !b.is_negative() {
        b.to_integer().to_u64()
    } else {
        None
    }
}

pub fn binomial_series(b: Rational) -> PowerSeries {
    let rule_b = b.clone();
    PowerSeries::new(Family::Binomial(b), move |n| gen_binom(&rule_b, n as u64))
}

/// Result of checking `binom(b, n) ∈ Z_p` for `n <= depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegralityCheck {
    pub holds: bool,
    pub first_failure: Option<u64>,
}

pub fn binom_in_zp(b: &Rational, p: Prime, depth: u64) -> IntegralityCheck {
    let mut c = Rational::one();
    for n in 0..=depth {
        if n > 0 {
            c = c * (b - int(n as i64 - 1)) / int(n as i64);
        }
        if matches!(ord(p, &c), Valuation::Finite(v) if v < 0) {
            return IntegralityCheck {
                holds: false,
                first_failure: Some(n),
            };
        }
    }
    IntegralityCheck {
        holds: true,
        first_failure: None,
    }
}

/// Exact radius of `(1 + X)^b` at `place`.
///
/// At a finite place with `|b|_p > 1` every `b - k` has the valuation of `b`,
/// so `ord binom(b, n) = n ord(b) - ord(n!)` and the radius is
/// `p^(-1/(p-1)) / |b|_p`.
pub fn binomial_radius(b: &Rational, place: Place) -> RadiusEstimate {
    if nonnegative_integer(b).is_some() {
        return RadiusEstimate::exact(place, RadiusValue::Infinite);
    }
    let value = match place {
        Place::Infinite => RadiusValue::Real(Rational::one()),
        Place::Finite(p) => match ord(p, b) {
            Valuation::Finite(v) if v < 0 => {
                RadiusValue::PowerOfPrime(Rational::new(BigInt::one(), BigInt::from(p.get() - 1)) - int(v))
            }
            _ => RadiusValue::PowerOfPrime(Rational::zero()),
        },
    };
    RadiusEstimate::exact(place, value)
}

pub(crate) fn tail_bound(b: &Rational, p: Prime, w: i64) -> Option<TailBound> {
    if let Some(d) = nonnegative_integer(b) {
        return Some(TailBound::vacuous(d as usize + 1));
    }
    let ob = ord(p, b).finite().expect("b is nonzero here");
    let slope = if ob >= 0 {
        int(w)
    } else {
        int(w + ob) - Rational::new(BigInt::one(), BigInt::from(p.get() - 1))
    };
    slope.is_positive().then(|| TailBound {
        start: 0,
        slope,
        offset: Rational::zero(),
    })
}

/// A proof that `binom(b, n) x^n` does not tend to 0 when `|x|_p` equals the
/// radius.
pub(crate) fn boundary_divergence(b: &Rational, p: Prime, x: &Rational) -> Option<String> {
    let w = ord(p, x).finite()?;
    let ob = ord(p, b).finite()?;
    if nonnegative_integer(b).is_some() {
        return None;
    }
    if ob >= 0 && w == 0 {
        // b has infinitely many nonzero p-adic digits, and by Lucas'
        // theorem binom(b, b mod p^j) is a unit for every j.
        let mut seen = Vec::new();
        for j in 1..=3u32 {
            let modulus = p.get().checked_pow(j).filter(|m| *m <= 2000);
            let Some(_) = modulus else { break };
            let n = padic::residue(b, p, j).to_u64().expect("fits");
            if ord(p, &gen_binom(b, n)) != Valuation::Finite(0) {
                return None;
            }
            seen.push(n);
        }
        return Some(format!(
            "|x|_{p} = 1 and b is a p-adic integer outside N: binom(b, b mod {p}^j) is a unit for every j \
             (checked at n = {seen:?}), so infinitely many terms have norm 1"
        ));
    }
    if ob < 0 && p.get() == 2 && w == 1 - ob {
        return Some(String::from(
            "ord_2(binom(b, n) x^n) = s_2(n), which equals 1 at every n = 2^j, so terms do not tend to 0",
        ));
    }
    None
}

/// `u/v` in lowest terms with `v > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint {
    pub u: i64,
    pub v: i64,
}

impl RationalPoint {
    pub fn value(self) -> Rational {
        arith::rat(self.u, self.v)
    }
}

/// All `u/v` with `gcd(u, v) = 1`, `|u| < |v| <= height`, `p | u` and
/// `p ∤ v`, ordered by value.
pub fn rational_points(p: Prime, height: u64) -> Vec<RationalPoint> {
    let pp = p.get() as i64;
    let h = height as i64;
    let mut out = Vec::new();
    for v in 1..=h {
        if v % pp == 0 {
            continue;
        }
        for u in (1 - v)..v {
            if u % pp == 0 && u.gcd(&v) == 1 {
                out.push(RationalPoint { u, v });
            }
        }
    }
    out.sort_by(|a, b| a.value().cmp(&b.value()));
    out
}

/// Both sides of the equivalence `u^N ≡ v^N (mod p)` iff `|(u/v)^N - 1|_p < 1`.
pub fn lemma46_check(u: i64, v: i64, n: u32, p: Prime) -> Result<(bool, bool)> {
    if v == 0 || u.gcd(&v) != 1 {
        return Err(Error::Precondition(format!("gcd({u}, {v}) must be 1")));
    }
    if v % p.get() as i64 == 0 {
        return Err(Error::Precondition(format!("{p} divides v = {v}")));
    }
    let pb = BigInt::from(p.get());
    let un = num_traits::pow(BigInt::from(u), n as usize);
    let vn = num_traits::pow(BigInt::from(v), n as usize);
    let congruence = (un.clone() - vn.clone()).mod_floor(&pb).is_zero();
    let norm_condition = padic_norm(p, &(Rational::new(un, vn) - Rational::one())) < Rational::one();
    Ok((congruence, norm_condition))
}

/// The series sum at `X = (u/v)^N - 1`, checked against the Hensel root and
/// against the three candidate closed forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumReport {
    pub prime: Prime,
    pub x: Rational,
    pub series_value: PadicNumber,
    pub hensel_value: PadicNumber,
    pub agree: bool,
    pub equals_u_over_v: bool,
    pub equals_minus_u_over_v: bool,
    pub equals_power: bool,
    /// Present when `|X| < 1`; an error here (say, depth exhausted for `X`
    /// near `-1`) does not invalidate the p-adic result.
    pub real: Option<Result<RealSum>>,
}

impl SumReport {
    pub fn relation(&self) -> &'static str {
        match (self.equals_u_over_v, self.equals_minus_u_over_v) {
            (true, _) => "equals u/v",
            (false, true) => "equals -u/v",
            _ => "differs from +-u/v",
        }
    }
}

/// Archimedean summation when `|X| < 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealSum {
    pub approx: Rational,
    pub terms: usize,
    pub tolerance: Rational,
    /// The positive real root, which the series equals on `|X| < 1`.
    pub exact: Rational,
}

fn is_root_in_disc(c: &Rational, s: u64, target: &Rational, p: Prime) -> bool {
    !c.is_zero()
        && pow_i(c, s as i64) == *target
        && padic_norm(p, &(c - Rational::one())) < Rational::one()
}

pub fn rational_sum_verify(n: i64, u: i64, v: i64, p: Prime, precision: u32, config: &EngineConfig) -> Result<SumReport> {
    if n == 0 {
        return Err(Error::Precondition(String::from("N must be nonzero")));
    }
    if n % p.get() as i64 == 0 {
        return Err(Error::Precondition(format!("{p} divides N = {n}")));
    }
    let s = n.unsigned_abs();
    let (congruence, _) = lemma46_check(u, v, s as u32, p)?;
    if !congruence {
        return Err(Error::Precondition(format!("{u}^{s} is not congruent to {v}^{s} mod {p}")));
    }
    let uv = arith::rat(u, v);
    let x = pow_i(&uv, n) - Rational::one();
    let f = binomial_series(Rational::new(BigInt::one(), BigInt::from(n)));
    let series_value = match evaluate(&f, &x, Place::Finite(p), &Target::Digits(precision), config)? {
        Evaluation::Padic(y) => y,
        Evaluation::Real { .. } => unreachable!("finite place"),
    };
    // Y^N = 1 + X, rewritten with a positive exponent.
    let target = pow_i(&uv, s as i64);
    let hensel_value = hensel_root(&HenselProblem::new(p, s, target.clone()), precision)?;
    let agree = series_value.to_rational() == hensel_value.to_rational()
        && series_value.absolute_precision() == hensel_value.absolute_precision();
    let power = pow_i(&uv, n);
    let real = if x.abs() < Rational::one() {
        let sum = evaluate(&f, &x, Place::Infinite, &Target::Tolerance(config.tolerance.clone()), config);
        Some(sum.map(|e| match e {
            Evaluation::Real {
                value,
                terms,
                tolerance,
            } => RealSum {
                approx: value,
                terms,
                tolerance,
                exact: uv.abs(),
            },
            Evaluation::Padic(_) => unreachable!("real place"),
        }))
    } else {
        None
    };
    Ok(SumReport {
        prime: p,
        equals_u_over_v: is_root_in_disc(&uv, s, &target, p),
        equals_minus_u_over_v: is_root_in_disc(&-uv.clone(), s, &target, p),
        equals_power: is_root_in_disc(&power, s, &target, p),
        x,
        series_value,
        hensel_value,
        agree,
        real,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumRelation {
    EqualsC,
    EqualsMinusC,
    /// Gate failed, or `p | s` leaves more than one root in the disc.
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceSum {
    pub place: Place,
    pub value: Evaluation,
    /// `y^s = (1 + x)^r` to working precision (real: within tolerance).
    pub residual_ok: bool,
    pub gate_plus: bool,
    pub gate_minus: bool,
    pub relation: SumRelation,
}

/// Evaluate `(1 + x)^(r/s)` at each place and decide whether it equals `±c`.
pub fn multi_place_sum(
    r: i64,
    s: i64,
    x: &Rational,
    places: &[Place],
    c: &Rational,
    precision: u32,
    config: &EngineConfig,
) -> Result<Vec<PlaceSum>> {
    if s == 0 {
        return Err(Error::Precondition(String::from("s must be nonzero")));
    }
    let (r, s) = if s < 0 { (-r, -s) } else { (r, s) };
    let b = arith::rat(r, s);
    let f = binomial_series(b.clone());
    let t = pow_i(&(Rational::one() + x), r);
    let mut places = places.to_vec();
    places.sort();
    places.dedup();
    let mut out = Vec::with_capacity(places.len());
    for place in places {
        if norm_of(place, x) >= Rational::one() {
            return Err(Error::Precondition(format!("|x|_{place} must be < 1")));
        }
        let gate_plus = norm_of(place, &(c - Rational::one())) < Rational::one();
        let gate_minus = norm_of(place, &(-c - Rational::one())) < Rational::one();
        let candidate = |sign_plus: bool| if sign_plus { c.clone() } else { -c.clone() };
        match place {
            Place::Finite(p) => {
                if matches!(ord(p, &b), Valuation::Finite(v) if v < 0) {
                    return Err(Error::Precondition(format!("|{b}|_{p} > 1")));
                }
                let y = match evaluate(&f, x, place, &Target::Digits(precision), config)? {
                    Evaluation::Padic(y) => y,
                    Evaluation::Real { .. } => unreachable!(),
                };
                let k = y.absolute_precision().unwrap_or(i64::from(precision));
                let ys = y.pow(s as u32)?;
                let residual_ok = ys.truncate(k).to_rational()
                    == PadicNumber::from_rational_abs(p, &t, k).to_rational();
                let unique = s as u64 % p.get() != 0;
                let certify = |sign_plus: bool, gate: bool| {
                    let cand = candidate(sign_plus);
                    gate && unique && pow_i(&cand, s) == t
                };
                let relation = if certify(true, gate_plus) {
                    SumRelation::EqualsC
                } else if certify(false, gate_minus) {
                    SumRelation::EqualsMinusC
                } else {
                    SumRelation::Ambiguous
                };
                if relation != SumRelation::Ambiguous {
                    let cand = candidate(relation == SumRelation::EqualsC);
                    if PadicNumber::from_rational_abs(p, &cand, k).to_rational() != y.to_rational() {
                        return Err(Error::Internal(format!("series value at {p} disagrees with certified root")));
                    }
                }
                out.push(PlaceSum {
                    place,
                    value: Evaluation::Padic(y),
                    residual_ok,
                    gate_plus,
                    gate_minus,
                    relation,
                });
            }
            Place::Infinite => {
                let value = evaluate(&f, x, place, &Target::Tolerance(config.tolerance.clone()), config)?;
                let Evaluation::Real { value: approx, .. } = &value else {
                    unreachable!()
                };
                // (1 + x)^(r/s) is the positive real root of Y^s = (1 + x)^r
                let certify = |sign_plus: bool, gate: bool| {
                    let cand = candidate(sign_plus);
                    gate && cand.is_positive() && pow_i(&cand, s) == t
                };
                let relation = if certify(true, gate_plus) {
                    SumRelation::EqualsC
                } else if certify(false, gate_minus) {
                    SumRelation::EqualsMinusC
                } else {
                    SumRelation::Ambiguous
                };
                let gap = (pow_i(approx, s) - &t).abs();
                out.push(PlaceSum {
                    place,
                    residual_ok: gap < config.tolerance.clone() * int(s.max(1) * 16),
                    value,
                    gate_plus,
                    gate_minus,
                    relation,
                });
            }
        }
    }
    Ok(out)
}

fn norm_of(place: Place, x: &Rational) -> Rational {
    arith::norm(place, x)
}
