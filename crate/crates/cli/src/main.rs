//! `hdr`: expand the explicit solution, run the verification suites, and
//! extract regrouped coefficients.
//!
//! Results go to standard output, progress and the parameter header to
//! standard error. Exit status: 0 when every check passes, 1 when an identity
//! fails, 2 on bad flags or parameters.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdr_core::modp::{extract_regrouped, verify_theorem_mod_p};
use hdr_core::operators::{verify_operators, Operators};
use hdr_core::report::{Check, Report};
use hdr_core::ring::{ScalarField, TruncationParams};
use hdr_core::solution::{phi_infinity, phi_table, verify_cell, verify_lemma_aggregation};
use hdr_core::{par, Error};

#[derive(Parser)]
#[command(name = "hdr", version, about = "Exact computations in the truncated Higgs-de Rham ring")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "HDR_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Truncation {
    /// Number of columns.
    #[arg(long, env = "HDR_N", default_value_t = 2)]
    n: u32,
    /// Highest row (default: the largest r used, at least 1).
    #[arg(long = "K", env = "HDR_K")]
    k: Option<u32>,
    /// Truncation degree: monomials of h/ζ degree >= m vanish (default 4).
    #[arg(long, env = "HDR_M")]
    m: Option<u32>,
}

impl Truncation {
    fn resolve(&self, rows: i64) -> Result<TruncationParams, Error> {
        let k = self.k.unwrap_or_else(|| rows.max(1) as u32);
        TruncationParams::new(self.n, k, self.m.unwrap_or(4))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Tex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Theorem,
    Lemma,
    Operators,
    Modp,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Print φ(r, s) of the explicit solution.
    Expand {
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run verification suites and report every check.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long = "max-r", default_value_t = 2)]
        max_r: u32,
        #[arg(long = "max-s", default_value_t = 2)]
        max_s: u32,
        #[command(flatten)]
        trunc: Truncation,
        /// Primes for the mod-p suite (m is set to p).
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5])]
        p: Vec<u64>,
        /// Random elements for the operator suite.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the full report as JSON instead of one line per check.
        #[arg(long)]
        json: bool,
    },
    /// Solve for the regrouped coefficients a'(J, s) at one cell.
    Regroup {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[command(flatten)]
        trunc: Truncation,
        /// Report p-integrality of the coefficients at these primes.
        #[arg(long = "check-p", value_delimiter = ',')]
        check_p: Vec<u64>,
    },
}

enum Failure {
    Usage(String),
    Identity,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn header(params: &TruncationParams, extra: &str) {
    let workers = if par::is_parallel() { "parallel" } else { "sequential" };
    eprintln!("hdr: {params}{extra} ({workers})");
}

fn expand(r: i64, s: i64, trunc: Truncation, format: Format) -> Result<(), Failure> {
    let params = trunc.resolve(r)?;
    header(&params, "");
    let phi = phi_infinity(r, s, params)?;
    let text = match format {
        Format::Text => phi.to_text(),
        Format::Json => phi.to_json_string(),
        Format::Tex => phi.to_tex(),
    };
    println!("{text}");
    Ok(())
}

struct Printer {
    json: bool,
    report: Report,
}

impl Printer {
    fn emit(&mut self, suite: &str, checks: Vec<Check>) {
        let mut out = std::io::stdout().lock();
        for c in checks {
            let c = c.with_suite_if_unset(suite);
            if !self.json {
                let status = if c.pass { "pass" } else { "FAIL" };
                let mut line = format!("{status} {suite}");
                if let (Some(r), Some(s)) = (c.r, c.s) {
                    line.push_str(&format!(" r={r} s={s}"));
                }
                if let Some(p) = c.prime {
                    line.push_str(&format!(" p={p}"));
                }
                line.push_str(&format!(" {}", c.check));
                if let Some(res) = &c.residual {
                    line.push_str(&format!(" residual={res}"));
                }
                let _ = writeln!(out, "{line}");
            }
            self.report.push(c);
        }
        let _ = out.flush();
    }
}

fn theorem_suite(printer: &mut Printer, max_r: u32, max_s: u32, params: TruncationParams) -> Result<(), Failure> {
    let table = phi_table(max_r, max_s + 1, params)?;
    let ops = Operators::new(params, ScalarField::Rational);
    for r in 0..=i64::from(max_r) {
        let cells: Vec<i64> = (-1..=i64::from(max_s)).collect();
        let results = par::map(&cells, |&s| verify_cell(&ops, &table, r, s));
        for (s, checks) in cells.iter().zip(results) {
            eprintln!("theorem: cell ({r}, {s}) done");
            printer.emit("theorem", checks?);
        }
    }
    Ok(())
}

fn lemma_suite(printer: &mut Printer, max_r: u32, max_s: u32, params: TruncationParams) -> Result<(), Failure> {
    let table = phi_table(max_r, max_s + 1, params)?;
    for r in 1..=max_r {
        for s in 0..=i64::from(max_s) {
            let report = verify_lemma_aggregation(r, s, &table)?;
            eprintln!("lemma: cell ({r}, {s}) done");
            printer.emit("lemma", report.checks);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suite: Suite,
    max_r: u32,
    max_s: u32,
    trunc: Truncation,
    primes: &[u64],
    samples: usize,
    seed: u64,
    json: bool,
) -> Result<(), Failure> {
    let params = trunc.resolve(i64::from(max_r))?;
    header(&params, "");
    let mut printer = Printer {
        json,
        report: Report::new(params),
    };
    let run = |s: Suite| suite == s || suite == Suite::All;
    if run(Suite::Theorem) {
        theorem_suite(&mut printer, max_r, max_s, params)?;
    }
    if run(Suite::Lemma) && max_r >= 1 {
        lemma_suite(&mut printer, max_r, max_s, params)?;
    }
    if run(Suite::Operators) {
        let report = verify_operators(params, samples, seed)?;
        eprintln!("operators: {samples} samples done");
        printer.emit("operators", report.checks);
    }
    if run(Suite::Modp) {
        for &p in primes {
            let m = u32::try_from(p).map_err(|_| Failure::Usage(format!("prime {p} too large")))?;
            if suite == Suite::Modp && trunc.m.is_some_and(|m| u64::from(m) != p) {
                return Err(Failure::Usage(format!("the mod-{p} suite needs --m {p}")));
            }
            let pp = params.with_m(m)?;
            let report = verify_theorem_mod_p(p, max_r, max_s, pp)?;
            eprintln!("modp: p = {p} done");
            printer.emit("modp", report.checks);
        }
    }
    if json {
        println!("{}", printer.report.to_json_string());
    }
    let failed = printer.report.failures().count();
    eprintln!(
        "hdr: {} checks, {} failed",
        printer.report.checks.len(),
        failed
    );
    if failed > 0 {
        Err(Failure::Identity)
    } else {
        Ok(())
    }
}

fn regroup(r: u32, s: u32, trunc: Truncation, primes: &[u64]) -> Result<(), Failure> {
    let params = trunc.resolve(i64::from(r))?;
    header(&params, "");
    let form = match extract_regrouped(r, s, params) {
        Ok(form) => form,
        Err(e @ Error::RegroupInconsistent { .. }) => {
            eprintln!("hdr: {e}");
            return Err(Failure::Identity);
        }
        Err(e) => return Err(e.into()),
    };
    let mut value = form.to_json();
    let mut integral = true;
    if !primes.is_empty() {
        let verdicts: Vec<serde_json::Value> = primes
            .iter()
            .map(|&p| {
                let pass = form.integral_at(p);
                integral &= pass;
                serde_json::json!({ "prime": p, "pass": pass })
            })
            .collect();
        value["integrality"] = serde_json::Value::Array(verdicts);
    }
    println!("{}", serde_json::to_string_pretty(&value).expect("JSON"));
    if integral {
        Ok(())
    } else {
        Err(Failure::Identity)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = par::with_workers(cli.workers, || match cli.command {
        Command::Expand { r, s, trunc, format } => expand(r, s, trunc, format),
        Command::Verify {
            suite,
            max_r,
            max_s,
            trunc,
            p,
            samples,
            seed,
            json,
        } => verify(suite, max_r, max_s, trunc, &p, samples, seed, json),
        Command::Regroup { r, s, trunc, check_p } => regroup(r, s, trunc, &check_p),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Identity) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("hdr: {msg}");
            ExitCode::from(2)
        }
    }
}
