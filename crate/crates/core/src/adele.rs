//! Finite-support adeles: a real component, finitely many explicit p-adic
//! components, and a rational standing in at every other prime.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, int, ord, padic_norm, prime_factors, Place, Prime, Rational, Valuation};
use crate::binomial::{self, binomial_series};
use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::series::{
    converges_at, evaluate, evaluate_at_padic, EngineConfig, Evaluation, Family, PowerSeries, RadiusValue,
    Status, TailBound, Target,
};

/// Relative precision used when a default has to stand next to an exact zero.
const LIFT_PRECISION: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adele {
    real: Rational,
    finite: BTreeMap<Prime, PadicNumber>,
    default: Rational,
}

impl Adele {
    /// Fails unless every key matches its component's prime and every prime
    /// in the default's denominator is an explicit key.
    pub fn new(real: Rational, finite: BTreeMap<Prime, PadicNumber>, default: Rational) -> Result<Self> {
        for (p, x) in &finite {
            if x.prime() != *p {
                return Err(Error::PrimeMismatch(p.get(), x.prime().get()));
            }
        }
        for p in prime_factors(default.denom().magnitude())? {
            if !finite.contains_key(&p) {
                return Err(Error::InvalidSpec(format!(
                    "default {default} is not {p}-integral, so {p} must be listed explicitly"
                )));
            }
        }
        Ok(Adele { real, finite, default })
    }

    /// The diagonal image of a rational, explicit at the primes of its
    /// denominator.
    pub fn constant(c: Rational, precision: u32) -> Result<Self> {
        let mut finite = BTreeMap::new();
        for p in prime_factors(c.denom().magnitude())? {
            finite.insert(p, PadicNumber::from_rational(p, &c, precision)?);
        }
        Adele::new(c.clone(), finite, c)
    }

    pub fn zero() -> Self {
        Adele {
            real: Rational::zero(),
            finite: BTreeMap::new(),
            default: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Adele {
            real: Rational::one(),
            finite: BTreeMap::new(),
            default: Rational::one(),
        }
    }

    pub fn real(&self) -> &Rational {
        &self.real
    }

    pub fn finite(&self) -> &BTreeMap<Prime, PadicNumber> {
        &self.finite
    }

    pub fn default_value(&self) -> &Rational {
        &self.default
    }

    /// The component at `p`; unlisted primes get the default, exact if it is
    /// zero and to `precision` digits otherwise.
    pub fn component(&self, p: Prime, precision: u32) -> PadicNumber {
        match self.finite.get(&p) {
            Some(x) => x.clone(),
            None if self.default.is_zero() => PadicNumber::exact_zero(p),
            None => PadicNumber::from_rational(p, &self.default, precision.max(1)).expect("precision >= 1"),
        }
    }

    pub fn add(&self, rhs: &Adele) -> Result<Adele> {
        self.combine(rhs, AdeleOp::Add)
    }

    pub fn mul(&self, rhs: &Adele) -> Result<Adele> {
        self.combine(rhs, AdeleOp::Mul)
    }

    fn combine(&self, rhs: &Adele, op: AdeleOp) -> Result<Adele> {
        let real = op.apply_rational(&self.real, &rhs.real);
        let default = op.apply_rational(&self.default, &rhs.default);
        let mut finite = BTreeMap::new();
        let keys: Vec<Prime> = self.finite.keys().chain(rhs.finite.keys()).copied().collect();
        for p in keys {
            if finite.contains_key(&p) {
                continue;
            }
            let (a, b) = match (self.finite.get(&p), rhs.finite.get(&p)) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                (Some(a), None) => (a.clone(), lift_default(&rhs.default, a)),
                (None, Some(b)) => (lift_default(&self.default, b), b.clone()),
                (None, None) => unreachable!("key came from one side"),
            };
            finite.insert(p, op.apply_padic(&a, &b)?);
        }
        Adele::new(real, finite, default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdeleOp {
    Add,
    Mul,
}

impl AdeleOp {
    fn apply_rational(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            AdeleOp::Add => a + b,
            AdeleOp::Mul => a * b,
        }
    }

    fn apply_padic(self, a: &PadicNumber, b: &PadicNumber) -> Result<PadicNumber> {
        match self {
            AdeleOp::Add => a.add(b),
            AdeleOp::Mul => a.mul(b),
        }
    }
}

pub fn adele_ring_op(op: AdeleOp, a: &Adele, b: &Adele) -> Result<Adele> {
    a.combine(b, op)
}

/// The default as a p-adic number at least as precise as `like`, in both
/// the relative and the absolute sense.
fn lift_default(d: &Rational, like: &PadicNumber) -> PadicNumber {
    let p = like.prime();
    if d.is_zero() {
        return PadicNumber::exact_zero(p);
    }
    let v = ord(p, d).finite().expect("nonzero");
    let rel = match (like.relative_precision(), like.absolute_precision()) {
        (None, None) => LIFT_PRECISION as i64,
        (r, a) => {
            let r = r.map_or(0, i64::from);
            let a = a.map_or(0, |a| a - v);
            r.max(a)
        }
    };
    let rel = u32::try_from(rel.max(1)).unwrap_or(u32::MAX);
    PadicNumber::from_rational(p, d, rel).expect("precision >= 1")
}

impl fmt::Display for Adele {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{inf: {}", self.real)?;
        for (p, x) in &self.finite {
            write!(f, ", {p}: {x}")?;
        }
        write!(f, ", default: {}}}", self.default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdeleReport {
    pub is_idele: bool,
    pub violations: Vec<(Place, String)>,
    /// Remarks that do not affect the verdict.
    pub notes: Vec<String>,
}

impl IdeleReport {
    fn from_violations(violations: Vec<(Place, String)>, notes: Vec<String>) -> Self {
        IdeleReport {
            is_idele: violations.is_empty(),
            violations,
            notes,
        }
    }
}

/// Invertibility: every component is nonzero. Explicit components with norm
/// other than 1 are the permitted finitely many exceptions.
pub fn is_idele(a: &Adele) -> IdeleReport {
    let mut violations = Vec::new();
    if a.real.is_zero() {
        violations.push((Place::Infinite, String::from("real component is 0")));
    }
    for (p, x) in &a.finite {
        if x.is_exact_zero() {
            violations.push((Place::Finite(*p), String::from("component is 0")));
        } else if x.is_zero_sentinel() {
            violations.push((
                Place::Finite(*p),
                format!("component is O({p}^{}), not known to be invertible", x.absolute_precision().unwrap_or(0)),
            ));
        }
    }
    if a.default.is_zero() {
        let p = first_unlisted(a);
        violations.push((Place::Finite(p), String::from("default is 0, so every unlisted prime fails")));
    }
    IdeleReport::from_violations(violations, Vec::new())
}

fn first_unlisted(a: &Adele) -> Prime {
    (2u64..)
        .filter(|n| arith::is_prime(*n))
        .map(|n| Prime::new(n).expect("prime"))
        .find(|p| !a.finite.contains_key(p))
        .expect("finitely many keys")
}

/// Apply `f` at every place.
///
/// Unlisted primes carry the default `d`. A polynomial is evaluated there
/// exactly; any other series needs `d = 0`, since a nonzero rational is a
/// unit at almost every prime and so lies outside the disc of convergence.
pub fn apply_series(f: &PowerSeries, a: &Adele, precision: u32, config: &EngineConfig) -> Result<Adele> {
    let real_verdict = converges_at(f, &a.real, Place::Infinite, config.default_depth);
    if real_verdict.status != Status::ConvergesProven {
        return Err(Error::NotProvenConvergent {
            place: Place::Infinite,
            reason: real_verdict.witness,
        });
    }
    let real = match evaluate(f, &a.real, Place::Infinite, &Target::Tolerance(config.tolerance.clone()), config)? {
        Evaluation::Real { value, .. } => value,
        Evaluation::Padic(_) => unreachable!("real place"),
    };
    let mut finite = BTreeMap::new();
    for (p, x) in &a.finite {
        finite.insert(*p, evaluate_at_padic(f, x, precision, config)?);
    }
    let default = match f.degree_bound() {
        Some(d) => crate::series::partial_sum(f, &a.default, d + 1),
        None if a.default.is_zero() => f.coeff(0),
        None => {
            return Err(Error::NotProvenConvergent {
                place: Place::Finite(first_unlisted(a)),
                reason: format!(
                    "default {} has norm 1 at every unlisted prime; only 0 is admissible there",
                    a.default
                ),
            })
        }
    };
    for p in prime_factors(default.denom().magnitude())? {
        if let alloc::collections::btree_map::Entry::Vacant(e) = finite.entry(p) {
            e.insert(PadicNumber::from_rational(p, &default, precision.max(1))?);
        }
    }
    Adele::new(real, finite, default)
}

/// `F(a, b; c; x) = sum (a)_n (b)_n / ((c)_n n!) x^n`.
pub fn hypergeometric(a: Rational, b: Rational, c: Rational) -> Result<PowerSeries> {
    if c.is_integer() && !c.is_positive() {
        return Err(Error::Pole(c));
    }
    let (ra, rb, rc) = (a.clone(), b.clone(), c.clone());
    Ok(PowerSeries::new(Family::Hypergeometric { a, b, c }, move |n| {
        let mut acc = Rational::one();
        for k in 0..n as i64 {
            let k = int(k);
            acc = acc * (&ra + &k) * (&rb + &k) / ((&rc + &k) * (&k + Rational::one()));
        }
        acc
    }))
}

/// When one upper parameter cancels `c`, `(a)_n / n! = (-1)^n binom(-a, n)`,
/// so the coefficients have the norms of the binomial series with exponent
/// `-a`.
fn collapsed_exponent(a: &Rational, b: &Rational, c: &Rational) -> Option<Rational> {
    if b == c {
        Some(-a.clone())
    } else if a == c {
        Some(-b.clone())
    } else {
        None
    }
}

pub(crate) fn hypergeometric_radius(a: &Rational, b: &Rational, c: &Rational, place: Place) -> Option<RadiusValue> {
    if let Some(e) = collapsed_exponent(a, b, c) {
        return Some(binomial::binomial_radius(&e, place).value);
    }
    match place {
        // (a+n)(b+n) / ((c+n)(n+1)) -> 1
        Place::Infinite => Some(RadiusValue::Real(Rational::one())),
        Place::Finite(_) => None,
    }
}

pub(crate) fn hypergeometric_tail_bound(a: &Rational, b: &Rational, c: &Rational, p: Prime, w: i64) -> Option<TailBound> {
    let e = collapsed_exponent(a, b, c)?;
    binomial::tail_bound(&e, p, w)
}

/// Evaluate `(1 + x_v)^a` at every place and check the result is an idele
/// whose explicit finite components are units.
///
/// Every component of `x` must have norm `< 1` at its place, so the default
/// must be 0. The exponent may be any `a` with `|a|_p <= 1` at the explicit
/// primes; a non-unit exponent is noted, not rejected.
pub fn idele_check_thm412(a_exp: &Rational, x: &Adele, precision: u32, config: &EngineConfig) -> Result<(Adele, IdeleReport)> {
    if x.real.abs() >= Rational::one() {
        return Err(Error::Precondition(format!("|x_inf| = {} must be < 1", x.real.abs())));
    }
    if !x.default.is_zero() {
        return Err(Error::Precondition(String::from(
            "the default must be 0 to have norm < 1 at every unlisted prime",
        )));
    }
    let mut notes = Vec::new();
    for (p, xp) in &x.finite {
        if xp.valuation_lower_bound().is_some_and(|v| v < 1) {
            return Err(Error::Precondition(format!("|x_{p}|_{p} must be < 1")));
        }
        match ord(*p, a_exp) {
            Valuation::Finite(v) if v < 0 => {
                return Err(Error::Precondition(format!("|{a_exp}|_{p} > 1")));
            }
            Valuation::Finite(v) if v > 0 => notes.push(format!("|{a_exp}|_{p} = {} is not a unit", padic_norm(*p, a_exp))),
            Valuation::Infinite => notes.push(format!("exponent 0 at {p}")),
            _ => {}
        }
    }
    let y = apply_series(&binomial_series(a_exp.clone()), x, precision, config)?;
    let mut violations = is_idele(&y).violations;
    for (p, yp) in &y.finite {
        match yp.norm() {
            Some(n) if n == Rational::one() => {}
            Some(n) => violations.push((Place::Finite(*p), format!("|y_{p}|_{p} = {n}, expected 1"))),
            None => violations.push((Place::Finite(*p), String::from("no significant digits"))),
        }
    }
    if !y.default.is_one() {
        violations.push((Place::Finite(first_unlisted(&y)), format!("default {} is not 1", y.default)));
    }
    violations.sort_by(|a, b| a.0.cmp(&b.0));
    violations.dedup();
    Ok((y, IdeleReport::from_violations(violations, notes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::series::coefficients_equal;
    use proptest::prelude::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn explicit(real: Rational, comps: &[(u64, Rational)], default: Rational) -> Adele {
        let finite = comps
            .iter()
            .map(|(q, x)| (p(*q), PadicNumber::from_rational(p(*q), x, 12).unwrap()))
            .collect();
        Adele::new(real, finite, default).unwrap()
    }

    #[test]
    fn invariant_enforced() {
        assert!(Adele::new(int(0), BTreeMap::new(), rat(1, 3)).is_err());
        assert!(Adele::constant(rat(1, 3), 8).is_ok());
        let mut m = BTreeMap::new();
        m.insert(p(3), PadicNumber::from_rational(p(5), &int(1), 4).unwrap());
        assert!(Adele::new(int(0), m, int(0)).is_err());
    }

    #[test]
    fn ring_examples() {
        let a = explicit(rat(1, 2), &[(5, rat(1, 5))], int(3));
        assert_eq!(a.add(&Adele::zero()).unwrap(), a);
        assert_eq!(Adele::one().mul(&Adele::one()).unwrap(), Adele::one());
        let b = explicit(int(0), &[(5, rat(1, 5))], int(0));
        let s = b.add(&b).unwrap();
        let c = &s.finite()[&p(5)];
        assert_eq!(c.to_rational(), rat(2, 5));
        assert_eq!(c.norm(), Some(int(5)));
    }

    #[test]
    fn idele_examples() {
        assert!(is_idele(&Adele::one()).is_idele);
        let r = is_idele(&explicit(int(0), &[], int(1)));
        assert!(!r.is_idele);
        assert_eq!(r.violations[0].0, Place::Infinite);
        assert!(is_idele(&explicit(int(1), &[(7, int(49))], int(1))).is_idele);
        assert!(!is_idele(&Adele::zero()).is_idele);
    }

    #[test]
    fn apply_examples() {
        let cfg = EngineConfig::default();
        let x = explicit(rat(1, 3), &[(3, int(3)), (7, rat(14, 5))], int(0));
        // 5 must be explicit only if the default needs it; here x_7 is 7-adic
        let y = apply_series(&binomial_series(rat(1, 2)), &x, 10, &cfg).unwrap();
        for (q, c) in y.finite() {
            assert!(padic_norm(*q, &(c.to_rational() - int(1))) < int(1));
        }
        assert_eq!(y.default_value(), &int(1));

        let c = apply_series(&PowerSeries::constant(int(4)), &explicit(int(9), &[], int(2)), 10, &cfg).unwrap();
        assert_eq!((c.real(), c.default_value()), (&int(4), &int(4)));

        let z = apply_series(&PowerSeries::exponential().cauchy_product(&PowerSeries::polynomial(alloc::vec![int(0), int(1)])), &explicit(rat(1, 2), &[], int(0)), 10, &cfg);
        // the product loses its family tag, so nothing is proven at the real place
        assert!(matches!(z, Err(Error::NotProvenConvergent { place: Place::Infinite, .. })));

        let w = apply_series(&binomial_series(rat(1, 2)), &explicit(int(0), &[], int(3)), 10, &cfg);
        assert!(matches!(w, Err(Error::NotProvenConvergent { .. })));
    }

    #[test]
    fn hypergeometric_examples() {
        let geo = hypergeometric(int(1), int(1), int(1)).unwrap();
        assert!((0..30).all(|n| geo.coeff(n) == int(1)));
        let f = hypergeometric(rat(2, 3), rat(5, 7), rat(1, 3)).unwrap();
        assert_eq!(f.coeff(0), int(1));
        assert!(coefficients_equal(&f, &PowerSeries::custom({
            let f = f.clone();
            move |n| f.coeff(n)
        }), 20));
        assert_eq!(hypergeometric(int(1), int(1), int(-2)).unwrap_err(), Error::Pole(int(-2)));
        assert!(hypergeometric(int(1), int(1), int(0)).is_err());
    }

    #[test]
    fn hypergeometric_is_negative_binomial() {
        // F(a, b; b; x) = (1 - x)^(-a): coefficients (-1)^n binom(-a, n)
        for a in [rat(1, 2), rat(-3, 5), int(2), rat(7, 3)] {
            let f = hypergeometric(a.clone(), rat(4, 9), rat(4, 9)).unwrap();
            let neg = -a.clone();
            let g = PowerSeries::custom(move |n| {
                let s = if n % 2 == 0 { int(1) } else { int(-1) };
                s * binomial::gen_binom(&neg, n as u64)
            });
            assert!(coefficients_equal(&f, &g, 40));
        }
        // and it is not (1 + x)^a
        let f = hypergeometric(int(2), int(3), int(3)).unwrap();
        assert!(!coefficients_equal(&f, &binomial_series(int(2)), 30));
    }

    #[test]
    fn small_adele_power_examples() {
        let cfg = EngineConfig::default();
        let (y, r) = idele_check_thm412(&int(2), &explicit(int(0), &[(5, int(5))], int(0)), 10, &cfg).unwrap();
        assert!(r.is_idele, "{r:?}");
        assert_eq!(y.finite()[&p(5)].norm(), Some(int(1)));

        let (y, r) = idele_check_thm412(&rat(1, 3), &Adele::zero(), 10, &cfg).unwrap();
        assert!(r.is_idele);
        assert_eq!(y, Adele::one());

        let x = explicit(int(0), &[(3, int(3)), (7, int(7))], int(0));
        let (y, r) = idele_check_thm412(&int(3), &x, 10, &cfg).unwrap();
        assert!(r.is_idele, "{r:?}");
        assert_eq!(y.real(), &int(1));
        assert!(!r.notes.is_empty());

        assert!(idele_check_thm412(&int(2), &explicit(int(0), &[(5, rat(1, 5))], int(0)), 10, &cfg).is_err());
    }

    fn small_adele() -> impl Strategy<Value = Adele> {
        let comp = (-30i64..30, 1i64..10);
        (
            (-20i64..20, 1i64..6),
            proptest::collection::vec((0usize..3, comp), 0..3),
            -5i64..5,
        )
            .prop_map(|((rn, rd), comps, d)| {
                let mut finite = BTreeMap::new();
                for (i, (n, dd)) in comps {
                    let q = p([2, 3, 5][i]);
                    finite.insert(q, PadicNumber::from_rational(q, &rat(n, dd), 10).unwrap());
                }
                Adele::new(rat(rn, rd), finite, int(d)).unwrap()
            })
    }

    fn same(a: &Adele, b: &Adele) -> bool {
        if a.real() != b.real() || a.default_value() != b.default_value() {
            return false;
        }
        let keys: Vec<_> = a.finite().keys().chain(b.finite().keys()).copied().collect();
        keys.into_iter().all(|q| {
            let x = a.component(q, 10);
            let y = b.component(q, 10);
            x.agrees_with(&y).unwrap_or(false)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ring_axioms(a in small_adele(), b in small_adele(), c in small_adele()) {
            prop_assert!(same(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
            prop_assert!(same(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
            prop_assert!(same(&a.add(&b).unwrap().add(&c).unwrap(), &a.add(&b.add(&c).unwrap()).unwrap()));
            prop_assert!(same(&a.mul(&b).unwrap().mul(&c).unwrap(), &a.mul(&b.mul(&c).unwrap()).unwrap()));
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert!(same(&lhs, &rhs));
        }

        #[test]
        fn ideles_are_adeles(a in small_adele()) {
            if is_idele(&a).is_idele {
                prop_assert!(Adele::new(a.real().clone(), a.finite().clone(), a.default_value().clone()).is_ok());
            }
        }
    }
}
