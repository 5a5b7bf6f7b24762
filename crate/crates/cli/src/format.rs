//! Text formats: rationals, places, p-adic digit strings, adeles and
//! coefficient rule files.
//!
//! A p-adic digit string is what [`PadicNumber`]'s `Display` writes:
//!
//! ```text
//! …6 6 6 1 . (base 7) + O(7^4)
//! ```
//!
//! Digits run from position `A - 1` down, the `.` sits between positions
//! 0 and -1, and `...` is accepted in place of `…`. An exact zero is `0`.
//!
//! An adele is `{inf: <rational>, <p>: <digit string>, ..., default: <rational>}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use adelic::adele::hypergeometric;
use adelic::arith::{Place, Prime, Rational};
use adelic::binomial::binomial_series;
use adelic::phi::{phi_series, ExponentRule, PhiSpec};
use adelic::{Adele, PadicNumber, PowerSeries};
use num_bigint::BigUint;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ParseError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

/// `a/b` or an integer literal.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return err("empty rational");
    }
    if let Some((n, d)) = s.split_once('/') {
        if d.trim().trim_start_matches(['+', '-']).chars().all(|c| c == '0') {
            return err(format!("zero denominator in {s:?}"));
        }
        let n = n.trim().parse().map_err(|_| ParseError(format!("bad numerator in {s:?}")))?;
        let d = d.trim().parse().map_err(|_| ParseError(format!("bad denominator in {s:?}")))?;
        Ok(Rational::new(n, d))
    } else {
        Rational::from_str(s).map_err(|_| ParseError(format!("not a rational: {s:?}")))
    }
}

pub fn parse_prime(s: &str) -> Result<Prime, ParseError> {
    let v: u64 = s.trim().parse().map_err(|_| ParseError(format!("not a prime: {s:?}")))?;
    Prime::new(v).map_err(|e| ParseError(e.to_string()))
}

/// A prime or `inf`.
pub fn parse_place(s: &str) -> Result<Place, ParseError> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(Place::Infinite),
        other => parse_prime(other).map(Place::Finite),
    }
}

pub fn parse_padic(p: Prime, s: &str) -> Result<PadicNumber, ParseError> {
    let s = s.trim();
    if s == "0" {
        return Ok(PadicNumber::exact_zero(p));
    }
    let body = s
        .strip_prefix('…')
        .or_else(|| s.strip_prefix("..."))
        .ok_or_else(|| ParseError(format!("digit string must start with '…': {s:?}")))?;
    let (digits, tail) = body
        .split_once("(base ")
        .ok_or_else(|| ParseError(format!("missing '(base p)' in {s:?}")))?;
    let (base, tail) = tail
        .split_once(')')
        .ok_or_else(|| ParseError(format!("unclosed '(base' in {s:?}")))?;
    let base: u64 = base.trim().parse().map_err(|_| ParseError(format!("bad base in {s:?}")))?;
    if base != p.get() {
        return err(format!("digit string is in base {base}, expected {p}"));
    }
    let abs = tail
        .trim()
        .strip_prefix('+')
        .map(str::trim)
        .and_then(|t| t.strip_prefix("O("))
        .and_then(|t| t.strip_suffix(')'))
        .and_then(|t| t.split_once('^'))
        .ok_or_else(|| ParseError(format!("missing '+ O(p^A)' in {s:?}")))?;
    if abs.0.trim() != base.to_string() {
        return err(format!("precision term is not a power of {p}"));
    }
    let abs: i64 = abs.1.trim().parse().map_err(|_| ParseError(format!("bad precision in {s:?}")))?;
    let (int_part, frac_part) = digits
        .split_once('.')
        .ok_or_else(|| ParseError(format!("missing '.' in {s:?}")))?;
    let mut value = BigUint::zero();
    let mut count = 0i64;
    for tok in int_part.split_whitespace().chain(frac_part.split_whitespace()) {
        let d: u64 = tok.parse().map_err(|_| ParseError(format!("bad digit {tok:?}")))?;
        if d >= p.get() {
            return err(format!("digit {d} out of range for base {p}"));
        }
        value = value * p.get() + d;
        count += 1;
    }
    if abs <= 0 && !int_part.trim().is_empty() {
        return err("integer digits present but the precision is not positive");
    }
    if abs > 0 && int_part.split_whitespace().count() as i64 != abs {
        return err(format!("expected {abs} digits before '.'"));
    }
    if count == 0 {
        return Ok(PadicNumber::zero_sentinel(p, abs));
    }
    PadicNumber::from_digits(p, &value, abs - count, abs).map_err(|e| ParseError(e.to_string()))
}

pub fn format_adele(a: &Adele) -> String {
    a.to_string()
}

pub fn parse_adele(s: &str) -> Result<Adele, ParseError> {
    let body = s
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| ParseError(String::from("adele must be enclosed in braces")))?;
    let mut real = None;
    let mut default = None;
    let mut finite = BTreeMap::new();
    for field in body.split(',') {
        let (key, value) = field
            .split_once(':')
            .ok_or_else(|| ParseError(format!("expected 'key: value', got {:?}", field.trim())))?;
        match key.trim() {
            "inf" => {
                if real.replace(parse_rational(value)?).is_some() {
                    return err("duplicate 'inf'");
                }
            }
            "default" => {
                if default.replace(parse_rational(value)?).is_some() {
                    return err("duplicate 'default'");
                }
            }
            k => {
                let p = parse_prime(k)?;
                if finite.insert(p, parse_padic(p, value)?).is_some() {
                    return err(format!("duplicate component at {p}"));
                }
            }
        }
    }
    let real = real.ok_or_else(|| ParseError(String::from("missing 'inf'")))?;
    let default = default.ok_or_else(|| ParseError(String::from("missing 'default'")))?;
    Adele::new(real, finite, default).map_err(|e| ParseError(e.to_string()))
}

pub fn read_adele(path: &Path) -> Result<Adele, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError(format!("{}: {e}", path.display())))?;
    parse_adele(&strip_comments(&text))
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ")
}

fn rationals(list: &str) -> Result<Vec<Rational>, ParseError> {
    list.split(',').map(parse_rational).collect()
}

/// Family specifications:
///
/// * `binomial:b`
/// * `phi:gamma,delta,eps,q,N` or `phi:gamma,delta,eps,q,poly=c0;c1;...`
/// * `hyp:a,b,c`
/// * `exp`
/// * `poly:c0,c1,...`
/// * anything else is a rule file path
pub fn parse_family(s: &str) -> Result<PowerSeries, ParseError> {
    let s = s.trim();
    if s == "exp" {
        return Ok(PowerSeries::exponential());
    }
    let Some((tag, rest)) = s.split_once(':') else {
        return read_rule_file(Path::new(s));
    };
    match tag {
        "binomial" => Ok(binomial_series(parse_rational(rest)?)),
        "hyp" => {
            let v = rationals(rest)?;
            let [a, b, c]: [Rational; 3] = v.try_into().map_err(|_| ParseError(String::from("hyp takes a,b,c")))?;
            hypergeometric(a, b, c).map_err(|e| ParseError(e.to_string()))
        }
        "poly" => Ok(PowerSeries::polynomial(rationals(rest)?)),
        "phi" => parse_phi(rest).map(phi_series),
        _ => read_rule_file(Path::new(s)),
    }
}

fn parse_int<T: FromStr>(s: &str, what: &str) -> Result<T, ParseError> {
    s.trim().parse().map_err(|_| ParseError(format!("bad {what}: {s:?}")))
}

pub fn parse_phi(rest: &str) -> Result<PhiSpec, ParseError> {
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != 5 {
        return err("phi takes gamma,delta,eps,q,N");
    }
    let gamma = parse_int(parts[0], "gamma")?;
    let delta = parse_int(parts[1], "delta")?;
    let eps = parse_int(parts[2], "eps")?;
    let q = parse_rational(parts[3])?;
    let rule = match parts[4].trim().strip_prefix("poly=") {
        Some(c) => ExponentRule::Polynomial(c.split(';').map(|k| parse_int(k, "coefficient")).collect::<Result<_, _>>()?),
        None => ExponentRule::Multiplier(parse_int(parts[4], "N")?),
    };
    PhiSpec::new(gamma, delta, eps, q, rule).map_err(|e| ParseError(e.to_string()))
}

/// Rule files are `key = value` lines with `#` comments. Either
/// `family = <family spec>`, or `coefficients = c0, c1, ...` with an optional
/// `tail = zero | periodic`. A zero tail gives a polynomial; a periodic tail
/// repeats the listed coefficients forever.
pub fn parse_rule(text: &str) -> Result<PowerSeries, ParseError> {
    let mut fields = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ParseError(format!("expected 'key = value', got {line:?}")))?;
        if fields.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return err(format!("duplicate key {:?}", k.trim()));
        }
    }
    if let Some(f) = fields.remove("family") {
        if !fields.is_empty() {
            return err("'family' cannot be combined with other keys");
        }
        if !f.contains(':') && f != "exp" {
            return err("nested rule files are not allowed");
        }
        return parse_family(&f);
    }
    let coeffs = rationals(
        &fields
            .remove("coefficients")
            .ok_or_else(|| ParseError(String::from("rule file needs 'family' or 'coefficients'")))?,
    )?;
    let tail = fields.remove("tail").unwrap_or_else(|| String::from("zero"));
    if let Some(k) = fields.keys().next() {
        return err(format!("unknown key {k:?}"));
    }
    match tail.as_str() {
        "zero" => Ok(PowerSeries::polynomial(coeffs)),
        "periodic" => {
            if coeffs.iter().all(Zero::is_zero) {
                return Ok(PowerSeries::polynomial(coeffs));
            }
            Ok(PowerSeries::custom(move |n| coeffs[n % coeffs.len()].clone()))
        }
        other => err(format!("unknown tail {other:?}")),
    }
}

pub fn read_rule_file(path: &Path) -> Result<PowerSeries, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError(format!("{}: {e}", path.display())))?;
    parse_rule(&text)
}
