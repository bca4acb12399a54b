//! `riffshuffle`: evaluate, inspect and verify the riffle-shuffle distribution
//! from the command line.
//!
//! Exit codes: 0 on success, 1 on bad arguments or parameters outside the
//! domain, 2 when `check` or `verify` finds a violated property.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use riffshuffle::exact::{self, format_fraction, parse_rational};
use riffshuffle::sampler::{self, Mechanism};
use riffshuffle::verify::{self, VerifyConfig};
use riffshuffle::{analysis, Error, ExactParams, Params, Rational};

#[derive(Parser, Debug)]
#[command(name = "riffshuffle", version, about = "Riffle-shuffle distribution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the mass function and its cumulative sums.
    Pmf(PointArgs),
    /// Print the mode set and the first descent.
    Mode(PointArgs),
    /// Check log-concavity and unimodality at one (p, m).
    Check(CheckArgs),
    /// Find the smallest m at which log-concavity fails.
    Scan(ScanArgs),
    /// Draw samples and compare them with the mass function.
    Sample(SampleArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct PArgs {
    /// Success probability, as a decimal or as `a/b` (which selects exact arithmetic).
    #[arg(long)]
    p: String,
    /// Use exact rational arithmetic; decimals are then read exactly.
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    p: PArgs,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Include index m-1 through the extended mass function.
    #[arg(long)]
    extended: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    p: PArgs,
    #[arg(long)]
    m_max: usize,
    /// Test the index m-1 condition instead of the in-support masses.
    #[arg(long)]
    extended: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Number of draws.
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[arg(long, env = "RIFFSHUFFLE_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "deck", value_parser = parse_mechanism)]
    mechanism: Mechanism,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Smaller grids with the same tolerances.
    #[arg(long)]
    quick: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn parse_mechanism(s: &str) -> Result<Mechanism, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone)]
enum P {
    Float(f64),
    Exact(Rational),
}

impl PArgs {
    fn resolve(&self) -> Result<P, Error> {
        if self.exact || self.p.contains('/') {
            return Ok(P::Exact(parse_rational(&self.p)?));
        }
        self.p
            .trim()
            .parse()
            .map(P::Float)
            .map_err(|_| Error::Parse(format!("cannot read {:?} as a probability", self.p)))
    }
}

/// Result of one command: what to print and how the process should exit.
struct Outcome {
    body: String,
    violation: bool,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, violation: false }
    }
}

type CmdResult = Result<Outcome, Error>;

fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn json_body(v: Value) -> String {
    format!("{v}\n")
}

fn p_json(p: &P) -> Value {
    match p {
        P::Float(x) => json!(x),
        P::Exact(r) => json!(format_fraction(r)),
    }
}

fn pmf(args: &PointArgs) -> CmdResult {
    let p = args.p.resolve()?;
    let (mass, cdf): (Vec<String>, Vec<String>) = match &p {
        P::Exact(r) => {
            let table = exact::exact_pmf_table(&ExactParams::new(r.clone(), args.m)?);
            let mut acc = Rational::from_integer(0.into());
            table
                .mass
                .iter()
                .map(|f| {
                    acc += f;
                    (format_fraction(f), format_fraction(&acc))
                })
                .unzip()
        }
        P::Float(x) => {
            let table = Params::new(*x, args.m)?.pmf_table();
            table.mass.iter().zip(&table.cumulative).map(|(&f, &c)| (float17(f), float17(c))).unzip()
        }
    };
    let exact = matches!(p, P::Exact(_));
    Ok(Outcome::ok(match args.format {
        Format::Csv => csv_table(
            &["k", "pmf", "cdf"],
            mass.into_iter().zip(cdf).enumerate().map(|(k, (f, c))| vec![k.to_string(), f, c]).collect(),
        ),
        Format::Json => {
            let (mass, cdf): (Value, Value) = if exact {
                (json!(mass), json!(cdf))
            } else {
                let num = |v: Vec<String>| v.iter().map(|s| s.parse::<f64>().unwrap()).collect::<Vec<_>>();
                (json!(num(mass)), json!(num(cdf)))
            };
            json_body(json!({"p": p_json(&p), "m": args.m, "exact": exact, "pmf": mass, "cdf": cdf}))
        }
    }))
}

fn mode(args: &PointArgs) -> CmdResult {
    let p = args.p.resolve()?;
    let result = match &p {
        P::Exact(r) => exact::exact_mode(&ExactParams::new(r.clone(), args.m)?),
        P::Float(x) => Params::new(*x, args.m)?.mode(),
    };
    Ok(Outcome::ok(match args.format {
        Format::Csv => csv_table(&["mode"], result.modes.iter().map(|k| vec![k.to_string()]).collect()),
        Format::Json => json_body(json!({
            "p": p_json(&p),
            "m": args.m,
            "exact": matches!(p, P::Exact(_)),
            "modes": result.modes,
            "first_descent": result.first_descent,
        })),
    }))
}

fn check(args: &CheckArgs) -> CmdResult {
    let point = &args.point;
    let p = point.p.resolve()?;
    let (scan, shape) = match &p {
        P::Exact(r) => {
            let ep = ExactParams::new(r.clone(), point.m)?;
            (exact::exact_log_concavity_scan(&ep, args.extended)?, exact::exact_unimodality_check(&ep))
        }
        P::Float(x) => {
            let params = Params::new(*x, point.m)?;
            (params.log_concavity_scan(args.extended)?, params.pmf_table().shape())
        }
    };
    let log_concave = scan.is_log_concave();
    let unimodal = shape.is_unimodal && shape.descent_persistent;
    let range = format!("{}..={}", scan.checked_range.start(), scan.checked_range.end());
    let body = match point.format {
        Format::Csv => {
            let violation = scan.first_violation.map(|k| format!("; violation at k={k}")).unwrap_or_default();
            let modes: Vec<String> = shape.modes.iter().map(usize::to_string).collect();
            csv_table(
                &["property", "holds", "detail"],
                vec![
                    vec!["log_concave".into(), log_concave.to_string(), format!("checked k in {range}{violation}")],
                    vec!["unimodal".into(), unimodal.to_string(), format!("modes {}", modes.join(" "))],
                ],
            )
        }
        Format::Json => json_body(json!({
            "p": p_json(&p),
            "m": point.m,
            "exact": matches!(p, P::Exact(_)),
            "extended": scan.used_extended,
            "checked_range": [scan.checked_range.start(), scan.checked_range.end()],
            "log_concave": log_concave,
            "first_violation": scan.first_violation,
            "unimodal": unimodal,
            "modes": shape.modes,
        })),
    };
    Ok(Outcome {
        body,
        violation: !(log_concave && unimodal),
    })
}

fn scan(args: &ScanArgs) -> CmdResult {
    let p = args.p.resolve()?;
    let first = match &p {
        P::Exact(r) if args.extended => analysis::min_m_extended_violation(r, args.m_max)?,
        P::Exact(r) => analysis::min_m_in_support_violation(r, args.m_max)?,
        P::Float(x) => analysis::min_m_violation_float(*x, args.m_max, args.extended)?,
    };
    Ok(Outcome::ok(match args.format {
        Format::Csv => {
            let p = match &p {
                P::Float(x) => x.to_string(),
                P::Exact(r) => format_fraction(r),
            };
            let first = first.map(|m| m.to_string()).unwrap_or_default();
            csv_table(&["p", "m_max", "extended", "first_failing_m"], vec![vec![p, args.m_max.to_string(), args.extended.to_string(), first]])
        }
        Format::Json => json_body(json!({
            "p": p_json(&p),
            "m_max": args.m_max,
            "exact": matches!(p, P::Exact(_)),
            "extended": args.extended,
            "first_failing_m": first,
        })),
    }))
}

fn sample(args: &SampleArgs) -> CmdResult {
    let point = &args.point;
    let params = match point.p.resolve()? {
        P::Float(x) => Params::new(x, point.m)?,
        P::Exact(r) => ExactParams::new(r, point.m)?.to_float()?,
    };
    let summary = sampler::empirical_pmf(&params, args.n, args.seed, args.mechanism)?;
    let table = params.pmf_table();
    let gof = sampler::gof_statistics(&summary, &table)?;
    Ok(Outcome::ok(match point.format {
        Format::Csv => csv_table(
            &["k", "count", "empirical", "pmf"],
            summary
                .counts
                .iter()
                .zip(summary.empirical())
                .zip(&table.mass)
                .enumerate()
                .map(|(k, ((c, e), f))| vec![k.to_string(), c.to_string(), float17(e), float17(*f)])
                .collect(),
        ),
        Format::Json => json_body(json!({
            "p": params.p(),
            "m": params.m(),
            "n": args.n,
            "seed": args.seed,
            "mechanism": args.mechanism,
            "counts": summary.counts,
            "tv_distance": gof.tv_distance,
            "chi_square": gof.chi_square,
        })),
    }))
}

fn run_verify(args: &VerifyArgs) -> CmdResult {
    let cfg = if args.quick { VerifyConfig::quick() } else { VerifyConfig::full() };
    let outcomes = verify::run_all(&cfg);
    let violation = outcomes.iter().any(|o| !o.passed);
    // timings go to stderr so that stdout stays deterministic
    for o in &outcomes {
        eprintln!("criterion {:>2}: {} ms", o.id, o.elapsed_ms);
    }
    let body = match args.format {
        Format::Csv => csv_table(
            &["id", "title", "passed", "detail"],
            outcomes
                .iter()
                .map(|o| vec![o.id.to_string(), o.title.to_string(), o.passed.to_string(), o.detail.clone()])
                .collect(),
        ),
        Format::Json => {
            let rows: Vec<Value> = outcomes
                .iter()
                .map(|o| json!({"id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail}))
                .collect();
            json_body(json!({"quick": args.quick, "passed": !violation, "criteria": rows}))
        }
    };
    Ok(Outcome { body, violation })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Pmf(a) => pmf(a),
        Command::Mode(a) => mode(a),
        Command::Check(a) => check(a),
        Command::Scan(a) => scan(a),
        Command::Sample(a) => sample(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.body.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(if out.violation { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
