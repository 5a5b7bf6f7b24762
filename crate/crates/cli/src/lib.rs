//! Command-line front end for `adelic`. Every invocation writes one JSON
//! document to stdout and human-readable notes to stderr.
//!
//! Exit codes: 0 ok, 1 domain error, 2 usage error.

pub mod format;

use std::ffi::OsString;
use std::path::PathBuf;

use adelic::adele::{apply_series, idele_check_thm412, is_idele};
use adelic::arith::{norm, ord, Place, Prime, Rational, Valuation};
use adelic::binomial::{rational_points, rational_sum_verify};
use adelic::phi::{summation_verify, ExponentRule, PhiSpec};
use adelic::series::{
    converges_at, evaluate, radius, ConvergenceVerdict, Evaluation, RadiusKind, RadiusMethod, RadiusValue, Target,
    TailBound,
};
use adelic::{EngineConfig, Error, IdeleReport, PowerSeries, Status};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

pub const MAX_DEPTH_VAR: &str = "PADIC_MAX_DEPTH";

#[derive(Debug, Parser)]
#[command(name = "adelic", version, about = "Exact p-adic and adelic computations", allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    format::parse_rational(s).map_err(|e| e.to_string())
}

fn prime_arg(s: &str) -> Result<Prime, String> {
    format::parse_prime(s).map_err(|e| e.to_string())
}

fn place_arg(s: &str) -> Result<Place, String> {
    format::parse_place(s).map_err(|e| e.to_string())
}

fn family_arg(s: &str) -> Result<PowerSeries, String> {
    format::parse_family(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// |x| at a place
    Norm {
        #[arg(short = 'p', value_parser = place_arg)]
        place: Place,
        #[arg(value_parser = rational_arg, allow_hyphen_values = true)]
        x: Rational,
    },
    /// ord_p(x)
    Ord {
        #[arg(short = 'p', value_parser = prime_arg)]
        prime: Prime,
        #[arg(value_parser = rational_arg, allow_hyphen_values = true)]
        x: Rational,
    },
    /// Radius of convergence of a series at a place
    Radius {
        #[arg(long, value_parser = family_arg)]
        family: PowerSeries,
        #[arg(short = 'p', value_parser = place_arg)]
        place: Place,
        /// Prefix length for empirical estimates
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Evaluate a series at a rational point
    Eval {
        #[arg(long, value_parser = family_arg)]
        family: PowerSeries,
        #[arg(short = 'x', value_parser = rational_arg, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, value_parser = place_arg)]
        place: Place,
        /// Absolute p-adic precision
        #[arg(long, conflicts_with = "tol")]
        prec: Option<u32>,
        /// Real tolerance
        #[arg(long, value_parser = rational_arg)]
        tol: Option<Rational>,
    },
    /// Rationals small at both infinity and p
    Points {
        #[arg(short = 'p', value_parser = prime_arg)]
        prime: Prime,
        #[arg(long)]
        height: u64,
    },
    /// Sum the binomial series at (u/v)^N - 1 and cross-check with Hensel
    #[command(name = "verify-thm47")]
    VerifyThm47 {
        #[arg(short = 'p', value_parser = prime_arg)]
        prime: Prime,
        #[arg(short = 'N')]
        n: i64,
        #[arg(short = 'u')]
        u: i64,
        #[arg(short = 'v')]
        v: i64,
        #[arg(long, default_value_t = 10)]
        prec: u32,
    },
    /// Check the telescoping summation formula
    #[command(name = "verify-sumform")]
    VerifySumform {
        #[arg(long)]
        gamma: u64,
        #[arg(long)]
        delta: u64,
        #[arg(long, value_parser = rational_arg)]
        q: Rational,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, value_parser = place_arg)]
        place: Place,
        #[arg(long)]
        depth: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps: i8,
        #[arg(long, value_parser = rational_arg, default_value = "1/1000000000")]
        tol: Rational,
    },
    /// Read an adele, optionally apply a series, optionally test invertibility
    #[command(name = "adele-check")]
    AdeleCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = family_arg)]
        apply: Option<PowerSeries>,
        #[arg(long)]
        idele: bool,
        /// Check that (1 + x)^a is an idele
        #[arg(long, value_parser = rational_arg, conflicts_with = "apply", allow_hyphen_values = true)]
        power: Option<Rational>,
        #[arg(long, default_value_t = 20)]
        prec: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub status: Outcome,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    fn ok(payload: Value) -> Self {
        CommandResult {
            status: Outcome::Ok,
            payload,
            diagnostics: Vec::new(),
        }
    }

    fn error(kind: &str, message: String) -> Self {
        CommandResult {
            status: Outcome::Error,
            payload: json!({ "kind": kind, "message": message }),
            diagnostics: vec![message],
        }
    }

    pub fn document(&self) -> Value {
        match self.status {
            Outcome::Ok => json!({ "status": "ok", "payload": self.payload }),
            Outcome::Error => json!({ "status": "error", "error": self.payload }),
        }
    }
}

/// What a process should print and return.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub result: Option<CommandResult>,
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Invocation {
    fn from_result(result: CommandResult, code: i32) -> Self {
        let stdout = format!("{}\n", serde_json::to_string_pretty(&result.document()).expect("json"));
        let stderr = result.diagnostics.iter().map(|d| format!("{d}\n")).collect();
        Invocation {
            result: Some(result),
            stdout,
            stderr,
            code,
        }
    }
}

/// Parse `argv` (including the program name) and run it. `max_depth` is
/// the raw value of `PADIC_MAX_DEPTH`, if set.
pub fn run<I, T>(argv: I, max_depth: Option<&str>) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Invocation {
                result: None,
                stdout: e.render().to_string(),
                stderr: String::new(),
                code: 0,
            };
        }
        Err(e) => {
            let msg = e.render().to_string().trim_end().to_string();
            return Invocation::from_result(CommandResult::error("usage", msg), 2);
        }
    };
    let mut config = EngineConfig::default();
    if let Some(raw) = max_depth {
        match raw.trim().parse::<usize>() {
            Ok(d) if d > 0 => config.max_depth = d,
            _ => {
                let msg = format!("{MAX_DEPTH_VAR} must be a positive integer, got {raw:?}");
                return Invocation::from_result(CommandResult::error("usage", msg), 2);
            }
        }
    }
    match dispatch(cli.command, &config) {
        Ok(r) => Invocation::from_result(r, 0),
        Err(Failure::Domain(e)) => Invocation::from_result(CommandResult::error("domain", e.to_string()), 1),
        Err(Failure::Usage(m)) => Invocation::from_result(CommandResult::error("usage", m), 2),
    }
}

enum Failure {
    Domain(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn s<T: ToString>(x: T) -> Value {
    Value::String(x.to_string())
}

fn approx(x: &Rational) -> Value {
    x.to_f64().map_or(Value::Null, |f| json!(f))
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::ConvergesProven => "converges-proven",
        Status::DivergesProven => "diverges-proven",
        Status::Undetermined => "undetermined",
    }
}

fn tail_json(t: &TailBound) -> Value {
    json!({ "start": t.start, "slope": s(&t.slope), "offset": s(&t.offset) })
}

fn verdict_json(v: &ConvergenceVerdict) -> Value {
    json!({
        "status": status_name(v.status),
        "depth": v.depth,
        "witness": v.witness,
        "tail": v.tail.as_ref().map(tail_json),
    })
}

fn idele_json(r: &IdeleReport) -> Value {
    json!({
        "is_idele": r.is_idele,
        "violations": r.violations.iter().map(|(p, m)| json!({ "place": s(p), "reason": m })).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

fn dispatch(command: Command, config: &EngineConfig) -> Result<CommandResult, Failure> {
    match command {
        Command::Norm { place, x } => Ok(CommandResult::ok(s(norm(place, &x)))),
        Command::Ord { prime, x } => Ok(CommandResult::ok(match ord(prime, &x) {
            Valuation::Finite(v) => s(v),
            Valuation::Infinite => s("inf"),
        })),
        Command::Radius { family, place, depth } => {
            let r = radius(&family, place, depth.unwrap_or(config.default_depth));
            let kind = match r.kind {
                RadiusKind::Exact => "exact",
                RadiusKind::Empirical => "empirical",
            };
            let method = match r.method {
                RadiusMethod::FamilyFormula => "family-formula",
                RadiusMethod::RootTestPrefix => "root-test-prefix",
                RadiusMethod::RatioTestPrefix => "ratio-test-prefix",
            };
            let mut payload = json!({
                "place": s(r.place),
                "kind": kind,
                "method": method,
                "value": s(&r.value),
            });
            match &r.value {
                RadiusValue::PowerOfPrime(t) => payload["exponent"] = s(t),
                RadiusValue::Real(x) => payload["value_approx"] = approx(x),
                _ => {}
            }
            Ok(CommandResult::ok(payload))
        }
        Command::Eval {
            family,
            x,
            place,
            prec,
            tol,
        } => {
            let target = match (place, prec, tol) {
                (Place::Finite(_), Some(k), None) => Target::Digits(k),
                (Place::Infinite, None, Some(t)) => Target::Tolerance(t),
                (Place::Infinite, None, None) => Target::Tolerance(config.tolerance.clone()),
                (Place::Finite(_), _, _) => return Err(Failure::Usage(String::from("--prec is required at a prime"))),
                (Place::Infinite, _, _) => return Err(Failure::Usage(String::from("--prec applies only at a prime; use --tol"))),
            };
            let verdict = converges_at(&family, &x, place, config.default_depth);
            let value = evaluate(&family, &x, place, &target, config)?;
            let mut payload = json!({ "place": s(place), "x": s(&x), "verdict": verdict_json(&verdict) });
            match value {
                Evaluation::Padic(v) => {
                    payload["value"] = s(&v);
                    payload["absolute_precision"] = json!(v.absolute_precision());
                }
                Evaluation::Real { value, terms, tolerance } => {
                    payload["value"] = s(&value);
                    payload["value_approx"] = approx(&value);
                    payload["terms"] = json!(terms);
                    payload["tolerance"] = s(&tolerance);
                }
            }
            Ok(CommandResult::ok(payload))
        }
        Command::Points { prime, height } => {
            let pts: Vec<Value> = rational_points(prime, height).into_iter().map(|pt| s(pt.value())).collect();
            Ok(CommandResult::ok(json!({ "prime": prime.get(), "height": height, "count": pts.len(), "points": pts })))
        }
        Command::VerifyThm47 { prime, n, u, v, prec } => {
            let r = rational_sum_verify(n, u, v, prime, prec, config)?;
            let real = match &r.real {
                None => Value::Null,
                Some(Ok(sum)) => json!({
                    "value": s(&sum.approx),
                    "value_approx": approx(&sum.approx),
                    "terms": sum.terms,
                    "tolerance": s(&sum.tolerance),
                    "exact": s(&sum.exact),
                }),
                Some(Err(e)) => json!({ "error": e.to_string() }),
            };
            let mut result = CommandResult::ok(json!({
                "prime": prime.get(),
                "N": n,
                "u": u,
                "v": v,
                "x": s(&r.x),
                "series_value": s(&r.series_value),
                "hensel_value": s(&r.hensel_value),
                "hensel_agrees": r.agree,
                "relation": r.relation(),
                "equals_power": r.equals_power,
                "real": real,
            }));
            if let Some(Err(e)) = &r.real {
                result.diagnostics.push(format!("real branch skipped: {e}"));
            }
            Ok(result)
        }
        Command::VerifySumform {
            gamma,
            delta,
            q,
            n,
            x,
            place,
            depth,
            eps,
            tol,
        } => {
            let spec = PhiSpec::new(gamma, delta, eps, q, ExponentRule::Multiplier(n))?;
            let r = summation_verify(&spec, &x, place, depth, &tol)?;
            let mut payload = json!({
                "place": s(place),
                "x": s(&x),
                "rhs": s(&r.rhs),
                "remainder": s(&r.remainder),
                "remainder_norm": s(&r.remainder_norm),
                "identity_holds": r.identity_failure.is_none(),
                "identity_failure": r.identity_failure,
                "verdict": verdict_json(&r.verdict),
            });
            if let Place::Finite(p) = place {
                payload["remainder_ord"] = match ord(p, &r.remainder) {
                    Valuation::Finite(v) => json!(v),
                    Valuation::Infinite => s("inf"),
                };
            } else {
                payload["remainder_norm_approx"] = approx(&r.remainder_norm);
            }
            Ok(CommandResult::ok(payload))
        }
        Command::AdeleCheck {
            input,
            apply,
            idele,
            power,
            prec,
        } => {
            let a = format::read_adele(&input).map_err(|e| Failure::Usage(format!("--input: {e}")))?;
            let mut payload = json!({ "adele": format::format_adele(&a) });
            let mut diagnostics = Vec::new();
            let subject = if let Some(f) = apply {
                let y = apply_series(&f, &a, prec, config)?;
                payload["result"] = s(format::format_adele(&y));
                y
            } else if let Some(e) = power {
                let (y, report) = idele_check_thm412(&e, &a, prec, config)?;
                payload["result"] = s(format::format_adele(&y));
                payload["power_check"] = idele_json(&report);
                diagnostics.extend(report.notes.iter().cloned());
                y
            } else {
                a
            };
            if idele {
                payload["idele"] = idele_json(&is_idele(&subject));
            }
            let mut r = CommandResult::ok(payload);
            r.diagnostics = diagnostics;
            Ok(r)
        }
    }
}
