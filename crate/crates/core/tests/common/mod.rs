//! Randomized property suites, shared by the property tests and the
//! acceptance runner. Each suite runs `CASES` deterministic cases.

#![allow(dead_code)]

use adelic::adele::{apply_series, is_idele, Adele};
use adelic::arith::{int, ord, padic_norm, pow_i, rat, Place, Prime, Rational, Valuation};
use adelic::binomial::{binom_in_zp, binomial_series, gen_binom, rational_points, rational_sum_verify};
use adelic::padic::{hensel_root, HenselProblem, PadicNumber};
use adelic::phi::{phi_coefficient, summation_lhs_partial, summation_rhs, PhiSpec};
use adelic::series::{
    coefficients_equal, converges_at, evaluate, term_norm, EngineConfig, Evaluation, PowerSeries, Status, Target,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use std::collections::BTreeMap;

pub const CASES: u32 = 500;

pub type Suite = (&'static str, fn() -> Result<(), String>);

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn prime(v: u64) -> Prime {
    Prime::new(v).unwrap()
}

fn small_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]).prop_map(prime)
}

/// `n/d * p^e` for a fixed pool of primes, so valuations vary.
fn rational_near(p: Prime) -> impl Strategy<Value = Rational> {
    (-1_000_000i64..1_000_000, 1i64..1_000_000, -6i64..6).prop_map(move |(n, d, e)| rat(n, d) * p.pow_rational(e))
}

fn prime_and_pair() -> impl Strategy<Value = (Prime, Rational, Rational)> {
    small_prime().prop_flat_map(|p| (Just(p), rational_near(p), rational_near(p)))
}

pub fn suites() -> Vec<Suite> {
    vec![
        ("norm multiplicativity", norm_multiplicative),
        ("ultrametric inequality", ultrametric),
        ("sharp ultrametric", sharp_ultrametric),
        ("ord additivity", ord_additivity),
        ("ord of a sum", ord_of_sum),
        ("integers have norm at most 1", integer_norms),
        ("p-adic norm agrees with exact norm", padic_norm_agrees),
        ("Hensel residual", hensel_residual),
        ("add then subtract recovers", add_sub_roundtrip),
        ("tail bound holds past depth", tail_bound_soundness),
        ("proven verdicts have vanishing terms", proven_terms_vanish),
        ("digit stability", digit_stability),
        ("Cauchy product associativity", cauchy_associative),
        ("Pascal identity", pascal),
        ("binomial coefficients in Z_p", binom_integral),
        ("rational points satisfy both norms", points_norms),
        ("series and Hensel root agree", sum_and_hensel_agree),
        ("telescoping identity", telescoping),
        ("phi term norms vanish", phi_terms_vanish),
        ("adele ring axioms", ring_axioms),
        ("ideles are adeles", ideles_are_adeles),
        ("binomial norm cascade", norm_cascade),
        ("hypergeometric with b = c is (1 - x)^(-a)", hypergeometric_negative_binomial),
    ]
}

pub fn norm_multiplicative() -> Result<(), String> {
    run(prime_and_pair(), |(p, x, y)| {
        prop_assert_eq!(padic_norm(p, &(&x * &y)), padic_norm(p, &x) * padic_norm(p, &y));
        Ok(())
    })
}

pub fn ultrametric() -> Result<(), String> {
    run(prime_and_pair(), |(p, x, y)| {
        let m = padic_norm(p, &x).max(padic_norm(p, &y));
        prop_assert!(padic_norm(p, &(&x + &y)) <= m);
        Ok(())
    })
}

pub fn sharp_ultrametric() -> Result<(), String> {
    run(prime_and_pair(), |(p, x, y)| {
        let (a, b) = (padic_norm(p, &x), padic_norm(p, &y));
        if a != b {
            prop_assert_eq!(padic_norm(p, &(&x + &y)), a.max(b));
        }
        Ok(())
    })
}

pub fn ord_additivity() -> Result<(), String> {
    run(prime_and_pair(), |(p, x, y)| {
        prop_assert_eq!(ord(p, &(&x * &y)), ord(p, &x) + ord(p, &y));
        if !y.is_zero() && !x.is_zero() {
            let (a, b) = (ord(p, &x).finite().unwrap(), ord(p, &y).finite().unwrap());
            prop_assert_eq!(ord(p, &(&x / &y)), Valuation::Finite(a - b));
        }
        Ok(())
    })
}

pub fn ord_of_sum() -> Result<(), String> {
    run(prime_and_pair(), |(p, x, y)| {
        prop_assert!(ord(p, &(&x + &y)) >= ord(p, &x).min(ord(p, &y)));
        Ok(())
    })
}

pub fn integer_norms() -> Result<(), String> {
    run((small_prime(), any::<i64>()), |(p, n)| {
        prop_assert!(padic_norm(p, &int(n)) <= Rational::one());
        Ok(())
    })
}

pub fn padic_norm_agrees() -> Result<(), String> {
    let strat = small_prime().prop_flat_map(|p| (Just(p), rational_near(p), 1u32..30));
    run(strat, |(p, x, k)| {
        prop_assume!(!x.is_zero());
        let y = PadicNumber::from_rational(p, &x, k).unwrap();
        prop_assert_eq!(y.norm(), Some(padic_norm(p, &x)));
        Ok(())
    })
}

pub fn hensel_residual() -> Result<(), String> {
    let strat = prop::sample::select(vec![3u64, 5, 7, 11]).prop_flat_map(|p| {
        (Just(prime(p)), 1u64..6, -500i64..500, 1i64..500, 1u32..25)
    });
    run(strat, |(p, s, a, d, k)| {
        prop_assume!(s % p.get() != 0 && d % p.get() as i64 != 0);
        // t = 1 + p a / d is congruent to 1 and a unit
        let t = Rational::one() + p.to_rational() * rat(a, d);
        let y = hensel_root(&HenselProblem::new(p, s, t.clone()), k).unwrap();
        let residual = pow_i(&y.to_rational(), s as i64) - &t;
        prop_assert!(residual.is_zero() || ord(p, &residual) >= Valuation::Finite(i64::from(k)));
        prop_assert!(padic_norm(p, &(y.to_rational() - Rational::one())) < Rational::one());
        Ok(())
    })
}

pub fn add_sub_roundtrip() -> Result<(), String> {
    let strat = small_prime().prop_flat_map(|p| (Just(p), rational_near(p), rational_near(p), 1u32..20, 1u32..20));
    run(strat, |(p, x, y, ka, kb)| {
        prop_assume!(!x.is_zero());
        let a = PadicNumber::from_rational(p, &x, ka).unwrap();
        let b = if y.is_zero() { PadicNumber::exact_zero(p) } else { PadicNumber::from_rational(p, &y, kb).unwrap() };
        let back = a.add(&b).unwrap().sub(&b).unwrap();
        prop_assert!(back.agrees_with(&a).unwrap());
        // the window can only shrink
        prop_assert!(back.absolute_precision() <= a.absolute_precision());
        Ok(())
    })
}

/// Binomial exponent and a point with `ord_p(x) >= 1`.
fn binomial_instance() -> impl Strategy<Value = (Prime, Rational, Rational)> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_flat_map(|p| {
        let p = prime(p);
        (Just(p), (-30i64..30, 1i64..30, -2i64..2), (-40i64..40, 1i64..40, 1i64..4))
            .prop_map(move |(p, (bn, bd, be), (xn, xd, xe))| {
                let b = rat(bn, bd) * p.pow_rational(be);
                let x = rat(xn, xd) * p.pow_rational(xe);
                (p, b, x)
            })
    })
}

pub fn tail_bound_soundness() -> Result<(), String> {
    run((binomial_instance(), 8usize..40), |((p, b, x), depth)| {
        let f = binomial_series(b);
        let v = converges_at(&f, &x, Place::Finite(p), depth);
        if v.status == Status::ConvergesProven {
            let tb = v.tail.expect("finite-place proof carries a bound");
            let coeffs = f.prefix(depth + 51);
            for n in tb.start.max(depth)..depth + 51 {
                let t = &coeffs[n] * pow_i(&x, n as i64);
                if let Valuation::Finite(o) = ord(p, &t) {
                    prop_assert!(int(o) >= tb.bound_at(n), "n = {}", n);
                }
            }
        }
        Ok(())
    })
}

pub fn proven_terms_vanish() -> Result<(), String> {
    run((binomial_instance(), 20usize..40), |((p, b, x), depth)| {
        let f = binomial_series(b);
        let place = Place::Finite(p);
        if converges_at(&f, &x, place, depth).status != Status::ConvergesProven {
            return Ok(());
        }
        let late = (depth..=depth + 50).map(|n| term_norm(&f, n, &x, place)).max().unwrap();
        let early = (0..=5).map(|n| term_norm(&f, n, &x, place)).filter(|t| !t.is_zero()).min();
        match early {
            Some(e) => prop_assert!(late.is_zero() || late < e),
            None => prop_assert!(late.is_zero()),
        }
        Ok(())
    })
}

pub fn digit_stability() -> Result<(), String> {
    let cfg = EngineConfig::default();
    run((binomial_instance(), 1u32..12, 1u32..12), move |((p, b, x), k, extra)| {
        let f = binomial_series(b);
        let place = Place::Finite(p);
        if converges_at(&f, &x, place, cfg.default_depth).status != Status::ConvergesProven {
            return Ok(());
        }
        let eval = |k| match evaluate(&f, &x, place, &Target::Digits(k), &cfg) {
            Ok(Evaluation::Padic(y)) => Ok(y),
            other => Err(format!("{other:?}")),
        };
        let (Ok(lo), Ok(hi)) = (eval(k), eval(k + extra)) else {
            return Ok(());
        };
        prop_assert_eq!(hi.truncate(i64::from(k)).to_rational(), lo.to_rational());
        Ok(())
    })
}

fn random_series() -> impl Strategy<Value = PowerSeries> {
    proptest::collection::vec((-9i64..10, 1i64..5), 1..12).prop_map(|c| {
        let c: Vec<Rational> = c.into_iter().map(|(n, d)| rat(n, d)).collect();
        PowerSeries::custom(move |n| c[n % c.len()].clone())
    })
}

pub fn cauchy_associative() -> Result<(), String> {
    run((random_series(), random_series(), random_series(), 0usize..=30), |(f, g, h, d)| {
        let left = f.cauchy_product(&g).cauchy_product(&h);
        let right = f.cauchy_product(&g.cauchy_product(&h));
        prop_assert!(coefficients_equal(&left, &right, d));
        Ok(())
    })
}

pub fn pascal() -> Result<(), String> {
    run(((-200i64..200, 1i64..50), 1u64..=100), |((bn, bd), n)| {
        let b = rat(bn, bd);
        let c = &b - Rational::one();
        prop_assert_eq!(gen_binom(&b, n), gen_binom(&c, n) + gen_binom(&c, n - 1));
        Ok(())
    })
}

pub fn binom_integral() -> Result<(), String> {
    let strat = prop::sample::select(vec![2u64, 3, 5, 7]).prop_flat_map(|p| (Just(prime(p)), -100i64..100, 1i64..100));
    run(strat, |(p, r, s)| {
        prop_assume!(s % p.get() as i64 != 0);
        prop_assert!(binom_in_zp(&rat(r, s), p, 200).holds);
        Ok(())
    })
}

pub fn points_norms() -> Result<(), String> {
    run((small_prime(), 1u64..40), |(p, h)| {
        for pt in rational_points(p, h) {
            let x = pt.value();
            prop_assert!(x.abs() < Rational::one());
            prop_assert!(padic_norm(p, &x) < Rational::one());
        }
        Ok(())
    })
}

pub fn sum_and_hensel_agree() -> Result<(), String> {
    let cfg = EngineConfig::default();
    let strat = prop::sample::select(vec![3u64, 5, 7])
        .prop_flat_map(|p| (Just(prime(p)), 1i64..5, 1i64..30, -6i64..6, prop::bool::ANY, 1u32..10));
    run(strat, move |(p, n, v, j, flip, k)| {
        let pp = p.get() as i64;
        // u ≡ ±v (mod p) makes u^N ≡ v^N for N even, and u ≡ v for any N
        let sign = if flip && n % 2 == 0 { -1 } else { 1 };
        let u = sign * v + pp * j;
        prop_assume!(n % pp != 0 && v % pp != 0 && u != 0 && num_integer::gcd(u, v) == 1);
        let r = rational_sum_verify(n, u, v, p, k, &cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(r.agree);
        Ok(())
    })
}

fn phi_spec() -> impl Strategy<Value = PhiSpec> {
    (1u64..3, 0u64..3, prop::bool::ANY, 1i64..5, 1i64..5, 2u64..4).prop_map(|(g, d, neg, qn, qd, n)| {
        PhiSpec::multiplier(g, d, if neg { -1 } else { 1 }, rat(qn, qd), n).unwrap()
    })
}

pub fn telescoping() -> Result<(), String> {
    run((phi_spec(), (-5i64..6, 1i64..5), 0u64..6), |(s, (xn, xd), m)| {
        prop_assume!(xn != 0);
        let (a, r) = summation_lhs_partial(&s, &rat(xn, xd), m).unwrap();
        prop_assert_eq!(a + r, summation_rhs(&s).unwrap());
        Ok(())
    })
}

pub fn phi_terms_vanish() -> Result<(), String> {
    let strat = (phi_spec(), prop::sample::select(vec![2u64, 3, 5]), -2i64..=10, 1i64..=10, -2i64..3);
    run(strat, |(s, p, xn, xd, e)| {
        prop_assume!(xn != 0);
        let p = prime(p);
        // |x|_p <= p^2 and |x| <= 10
        let x = rat(xn, xd) * p.pow_rational(e);
        prop_assume!(padic_norm(p, &x) <= p.pow_rational(2) && x.abs() <= int(10));
        let w = ord(p, &x).finite().unwrap();
        let f = adelic::phi::phi_series(s.clone());
        let tb = f.tail_bound(p, w).unwrap();
        let mut last_bound = None;
        for n in 0..14u64 {
            let (m, c) = phi_coefficient(&s, n);
            if (m as usize) < tb.start {
                continue;
            }
            let t = c * pow_i(&x, m as i64);
            let b = tb.bound_at(m as usize);
            prop_assert!(int(ord(p, &t).finite().unwrap()) >= b.clone());
            if let Some(prev) = last_bound.replace(b.clone()) {
                prop_assert!(b > prev);
            }
        }
        let (m, c) = phi_coefficient(&s, 13);
        let late = (c * pow_i(&x, m as i64)).abs();
        prop_assert!(late < rat(1, 1_000_000));
        Ok(())
    })
}

fn small_adele() -> impl Strategy<Value = Adele> {
    (
        (-20i64..20, 1i64..6),
        proptest::collection::vec((0usize..3, (-30i64..30, 1i64..10)), 0..3),
        -5i64..5,
    )
        .prop_map(|((rn, rd), comps, d)| {
            let mut finite = BTreeMap::new();
            for (i, (n, dd)) in comps {
                let q = prime([2, 3, 5][i]);
                finite.insert(q, PadicNumber::from_rational(q, &rat(n, dd), 10).unwrap());
            }
            Adele::new(rat(rn, rd), finite, int(d)).unwrap()
        })
}

fn same_adele(a: &Adele, b: &Adele) -> bool {
    if a.real() != b.real() || a.default_value() != b.default_value() {
        return false;
    }
    a.finite().keys().chain(b.finite().keys()).all(|q| {
        let (x, y) = (a.component(*q, 10), b.component(*q, 10));
        x.agrees_with(&y).unwrap_or(false)
    })
}

pub fn ring_axioms() -> Result<(), String> {
    run((small_adele(), small_adele(), small_adele()), |(a, b, c)| {
        prop_assert!(same_adele(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
        prop_assert!(same_adele(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        prop_assert!(same_adele(
            &a.add(&b).unwrap().add(&c).unwrap(),
            &a.add(&b.add(&c).unwrap()).unwrap()
        ));
        prop_assert!(same_adele(
            &a.mul(&b).unwrap().mul(&c).unwrap(),
            &a.mul(&b.mul(&c).unwrap()).unwrap()
        ));
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(same_adele(&lhs, &rhs));
        Ok(())
    })
}

pub fn ideles_are_adeles() -> Result<(), String> {
    run(small_adele(), |a| {
        if is_idele(&a).is_idele {
            prop_assert!(Adele::new(a.real().clone(), a.finite().clone(), a.default_value().clone()).is_ok());
        }
        Ok(())
    })
}

/// Partial sums of `(1 + x)^b - 1` stay inside the open unit disc when
/// `|b|_p <= 1` and `|x|_p < 1`.
pub fn norm_cascade() -> Result<(), String> {
    let cfg = EngineConfig::default();
    let strat = prop::sample::select(vec![2u64, 3, 5, 7])
        .prop_flat_map(|p| (Just(prime(p)), (-30i64..30, 1i64..30), (-40i64..40, 1i64..40, 1i64..3)));
    run(strat, move |(p, (bn, bd), (xn, xd, e))| {
        let pp = p.get() as i64;
        prop_assume!(bd % pp != 0 && xd % pp != 0);
        let b = rat(bn, bd);
        let x = rat(xn, xd) * p.pow_rational(e);
        let mut partial = Rational::zero();
        let mut top = Rational::zero();
        for i in 1..=40u64 {
            let t = gen_binom(&b, i) * pow_i(&x, i as i64);
            top = top.max(padic_norm(p, &t));
            partial += t;
            let n = padic_norm(p, &partial);
            prop_assert!(n <= top && top < Rational::one());
        }
        // componentwise application lands in the same disc
        let mut finite = BTreeMap::new();
        finite.insert(p, PadicNumber::from_rational(p, &x, 8).unwrap_or_else(|_| PadicNumber::exact_zero(p)));
        let a = Adele::new(Rational::zero(), finite, Rational::zero()).unwrap();
        let y = apply_series(&binomial_series(b), &a, 8, &cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let yp = y.finite()[&p].sub(&PadicNumber::from_rational(p, &int(1), 8).unwrap()).unwrap();
        if let Some(v) = yp.valuation_lower_bound() {
            prop_assert!(v >= 1);
        }
        Ok(())
    })
}

pub fn hypergeometric_negative_binomial() -> Result<(), String> {
    run(((-40i64..40, 1i64..20), (-40i64..40, 1i64..20)), |((an, ad), (bn, bd))| {
        let b = rat(bn, bd);
        prop_assume!(!(b.is_integer() && !b.is_positive()));
        let a = rat(an, ad);
        let f = adelic::adele::hypergeometric(a.clone(), b.clone(), b).unwrap();
        let neg = -a;
        let g = PowerSeries::custom(move |n| {
            let s = if n % 2 == 0 { int(1) } else { int(-1) };
            s * gen_binom(&neg, n as u64)
        });
        prop_assert!(coefficients_equal(&f, &g, 40));
        Ok(())
    })
}

/// `ord_p(n!)` by counting factors of `p` in each of `1..=n`.
pub fn brute_factorial_valuation(p: u64, n: u64) -> u64 {
    let mut total = 0;
    for mut k in 1..=n {
        while k % p == 0 {
            k /= p;
            total += 1;
        }
    }
    total
}
