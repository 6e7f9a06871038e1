//! `padix` command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check or negative control failed,
//! 2 usage or configuration error. Results go to stdout (or `--output`),
//! diagnostics to stderr.

use crate::analysis::{min_precision_for_packages, min_precision_for_prefix, Check, Report};
use crate::error::Error;
use crate::padic::{digitfile, PAdicInt, RenderMode, RenderStyle, COMPACT_MAX_PRIME};
use crate::prime::Prime;
use crate::rationality::{
    detect_eventual_period, periodic_to_rational, rational_to_padic, DetectionBounds,
    EventualPeriod, Rational,
};
use crate::series::{sum_series_with_threads, SeriesKind};
use crate::FORMAT_VERSION;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

/// Environment variable with the worker count for `sum` (alpha series only).
pub const THREADS_ENV: &str = "PADIX_THREADS";

/// Upper limit on `--digits`.
pub const MAX_DIGITS: usize = 10_000_000;
/// Upper limit on stream horizons (`n` values summed by `verify`).
pub const MAX_HORIZON: u64 = 1_000_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "padix",
    version,
    about = "Exact p-adic series and digit-structure checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum a series mod p^N.
    Sum(SumArgs),
    /// Rational <-> p-adic conversions.
    #[command(subcommand)]
    Rational(RationalCommand),
    /// Eventual-period search.
    #[command(subcommand)]
    Period(PeriodCommand),
    /// Run package and power-prefix checks.
    Verify(VerifyArgs),
    /// All checks plus the non-periodicity search as one JSON document.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Series {
    Alpha,
    Factorial,
}

impl From<Series> for SeriesKind {
    fn from(s: Series) -> Self {
        match s {
            Series::Alpha => SeriesKind::Alpha,
            Series::Factorial => SeriesKind::Factorial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Compact,
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Digitfile,
    Json,
}

#[derive(Debug, Args)]
pub struct DigitOutput {
    /// Drop leading zeros.
    #[arg(long)]
    pub trim: bool,
    #[arg(long, value_enum, default_value = "compact")]
    pub style: Style,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SumArgs {
    #[arg(long, value_enum, default_value = "alpha")]
    pub series: Series,
    #[arg(long)]
    pub prime: u64,
    /// Precision N (digits kept).
    #[arg(long)]
    pub digits: usize,
    #[command(flatten)]
    pub out: DigitOutput,
}

#[derive(Debug, Subcommand)]
pub enum RationalCommand {
    /// Expand num/den to N p-adic digits.
    ToPadic {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        #[arg(long, default_value = "1")]
        den: String,
        #[arg(long)]
        digits: usize,
        #[command(flatten)]
        out: DigitOutput,
    },
    /// Rational value of an eventually periodic expansion. Digits are given
    /// comma-separated in expansion order (coefficient of p^0 first).
    FromPeriod {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value = "")]
        preperiod: String,
        #[arg(long)]
        period: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum PeriodCommand {
    /// Search digits for the shortest eventual period.
    Detect(DetectArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub prime: Option<u64>,
    /// Digit file to search (its header supplies the prime).
    #[arg(long, conflicts_with_all = ["num", "series"])]
    pub input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "series")]
    pub num: Option<String>,
    #[arg(long, requires = "num")]
    pub den: Option<String>,
    #[arg(long, value_enum)]
    pub series: Option<Series>,
    /// Digits to generate (with --num/--series).
    #[arg(long)]
    pub digits: Option<usize>,
    /// Defaults to a quarter of the digits examined.
    #[arg(long)]
    pub max_preperiod: Option<usize>,
    /// Defaults to a quarter of the digits examined.
    #[arg(long)]
    pub max_period: Option<usize>,
    #[arg(long, default_value_t = DetectionBounds::DEFAULT_MIN_REPEATS)]
    pub min_repeats: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Packages,
    Prefix,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, value_enum, default_value = "all")]
    pub check: CheckKind,
    /// Last package index checked.
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Largest exponent r checked at n = p^r.
    #[arg(long)]
    pub r_max: Option<u32>,
    /// Precision; defaults to the smallest the requested checks accept.
    #[arg(long)]
    pub digits: Option<usize>,
    /// Last n whose partial sum is checked for frozen zeros; defaults to 4 p^r_max.
    #[arg(long)]
    pub freeze_horizon: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value_t = 100)]
    pub k_max: u64,
    #[arg(long, default_value_t = 6)]
    pub r_max: u32,
    /// Precision for the package/prefix checks; defaults to the smallest accepted.
    #[arg(long)]
    pub digits: Option<usize>,
    /// Digits of alpha_p searched for a period.
    #[arg(long, default_value_t = 4096)]
    pub search_digits: usize,
    #[arg(long, default_value_t = 1024)]
    pub max_preperiod: usize,
    #[arg(long, default_value_t = 512)]
    pub max_period: usize,
    #[arg(long, default_value_t = DetectionBounds::DEFAULT_MIN_REPEATS)]
    pub min_repeats: usize,
    #[arg(long)]
    pub freeze_horizon: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `argv` (program name first) and runs it against the process's
/// stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Sum(args) => cmd_sum(args, out, err),
        Command::Rational(RationalCommand::ToPadic {
            prime,
            num,
            den,
            digits,
            out: fmt,
        }) => cmd_to_padic(prime, &num, &den, digits, fmt, out, err),
        Command::Rational(RationalCommand::FromPeriod {
            prime,
            preperiod,
            period,
            json,
        }) => cmd_from_period(prime, &preperiod, &period, json, out),
        Command::Period(PeriodCommand::Detect(args)) => cmd_detect(args, out),
        Command::Verify(args) => cmd_verify(args, out, err),
        Command::Report(args) => cmd_report(args, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn prime(p: u64) -> CliResult<Prime> {
    Ok(Prime::new(p)?)
}

fn check_digits(n: usize) -> CliResult<usize> {
    if n == 0 {
        return Err(Error::ZeroPrecision.into());
    }
    if n > MAX_DIGITS {
        return Err(Error::TooLarge {
            what: "--digits",
            got: n as u64,
            maximum: MAX_DIGITS as u64,
        }
        .into());
    }
    Ok(n)
}

fn check_horizon(what: &'static str, n: u64) -> CliResult<u64> {
    if n > MAX_HORIZON {
        return Err(Error::TooLarge {
            what,
            got: n,
            maximum: MAX_HORIZON,
        }
        .into());
    }
    Ok(n)
}

fn threads_from_env() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn emit(text: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn effective_style(style: Style, p: Prime, err: &mut dyn Write) -> RenderStyle {
    match style {
        Style::List => RenderStyle::List,
        Style::Compact if p.get() > COMPACT_MAX_PRIME => {
            let _ = writeln!(
                err,
                "warning: compact digits need p <= {COMPACT_MAX_PRIME}; using list style"
            );
            RenderStyle::List
        }
        Style::Compact => RenderStyle::Compact,
    }
}

fn write_digits(
    value: &PAdicInt,
    fmt: &DigitOutput,
    extra: Value,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let mode = if fmt.trim {
        RenderMode::Trimmed
    } else {
        RenderMode::FixedWidth
    };
    let text = match fmt.format {
        Format::Digitfile => digitfile::write(value),
        Format::Text => {
            let style = effective_style(fmt.style, value.prime(), err);
            format!("{}\n", value.render(mode, style)?)
        }
        Format::Json => {
            let style = effective_style(fmt.style, value.prime(), err);
            let mut doc = json!({
                "digit_count": value.digit_count(),
                "digits": value.render(mode, style)?,
                "format_version": FORMAT_VERSION,
                "order": "msd",
                "precision": value.precision(),
                "prime": value.prime().get(),
            });
            if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
                doc.extend(extra);
            }
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
    };
    emit(&text, fmt.output.as_ref(), out)
}

fn cmd_sum(args: SumArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let p = prime(args.prime)?;
    let n = check_digits(args.digits)?;
    let threads = threads_from_env()?;
    let kind = SeriesKind::from(args.series);
    let value = sum_series_with_threads(kind, p, n, threads)?;
    write_digits(&value, &args.out, json!({ "series": kind }), out, err)?;
    Ok(0)
}

fn parse_rational(num: &str, den: &str) -> CliResult<Rational> {
    Ok(format!("{num}/{den}").parse::<Rational>()?)
}

fn cmd_to_padic(
    p: u64,
    num: &str,
    den: &str,
    digits: usize,
    fmt: DigitOutput,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<i32> {
    let p = prime(p)?;
    let n = check_digits(digits)?;
    let q = parse_rational(num, den)?;
    let value = rational_to_padic(&q, p, n)?;
    write_digits(&value, &fmt, json!({ "rational": q.to_string() }), out, err)?;
    Ok(0)
}

fn parse_digit_list(text: &str) -> CliResult<Vec<u64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Failure::Usage(format!("bad digit {t:?}: {e}")))
        })
        .collect()
}

fn cmd_from_period(
    p: u64,
    preperiod: &str,
    period: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let p = prime(p)?;
    let ep = EventualPeriod::new(parse_digit_list(preperiod)?, parse_digit_list(period)?, p)?;
    let q = periodic_to_rational(&ep, p);
    let text = if as_json {
        let doc = json!({
            "denominator": q.denom().to_string(),
            "format_version": FORMAT_VERSION,
            "numerator": q.numer().to_string(),
            "period": ep.period(),
            "preperiod": ep.preperiod(),
            "prime": p.get(),
            "rational": q.to_string(),
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
    } else {
        format!("{q}\n")
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}

fn cmd_detect(args: DetectArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (value, source) = if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)?;
        let value = digitfile::read(&text)?;
        if let Some(p) = args.prime {
            if p != value.prime().get() {
                return Err(Failure::Usage(format!(
                    "--prime {p} disagrees with the digit file (p={})",
                    value.prime()
                )));
            }
        }
        (value, json!({ "input": path.display().to_string() }))
    } else {
        let p = prime(
            args.prime
                .ok_or_else(|| Failure::Usage("--prime is required without --input".into()))?,
        )?;
        let n = check_digits(
            args.digits
                .ok_or_else(|| Failure::Usage("--digits is required without --input".into()))?,
        )?;
        if let Some(num) = &args.num {
            let den = args.den.as_deref().unwrap_or("1");
            let q = parse_rational(num, den)?;
            (
                rational_to_padic(&q, p, n)?,
                json!({ "rational": q.to_string() }),
            )
        } else if let Some(series) = args.series {
            let kind = SeriesKind::from(series);
            (
                sum_series_with_threads(kind, p, n, threads_from_env()?)?,
                json!({ "series": kind }),
            )
        } else {
            return Err(Failure::Usage(
                "give one of --input, --num/--den or --series".into(),
            ));
        }
    };
    let m = value.precision();
    let bounds = DetectionBounds {
        max_preperiod: args.max_preperiod.unwrap_or(m / 4),
        max_period: args.max_period.unwrap_or((m / 4).max(1)),
        min_repeats: args.min_repeats,
    };
    if bounds.max_period == 0 || bounds.min_repeats == 0 {
        return Err(Failure::Usage(
            "--max-period and --min-repeats must be positive".into(),
        ));
    }
    let detection = detect_eventual_period(value.digits(), value.prime(), bounds)?;
    let summary = detection.summary();
    let text = if args.json {
        let mut doc = serde_json::to_value(&summary).expect("json");
        let extra = json!({
            "bounds": bounds,
            "digits_examined": m,
            "format_version": FORMAT_VERSION,
            "prime": value.prime().get(),
            "required_digits": bounds.required_digits(),
            "source": source,
        });
        if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
            doc.extend(extra);
        }
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
    } else {
        match (&summary.preperiod_len, &summary.period_len) {
            (Some(l), Some(t)) => format!("{} l={l} t={t}\n", summary.status),
            _ => format!("{}\n", summary.status),
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}

struct Plan {
    packages: Option<(u64, usize)>,
    prefix: Option<(u32, usize, u64)>,
}

fn plan_checks(
    p: Prime,
    check: CheckKind,
    k_max: Option<u64>,
    r_max: Option<u32>,
    digits: Option<usize>,
    freeze_horizon: Option<u64>,
) -> CliResult<(Plan, usize)> {
    let want_packages = matches!(check, CheckKind::Packages | CheckKind::All);
    let want_prefix = matches!(check, CheckKind::Prefix | CheckKind::All);
    let k_max = if want_packages {
        let k = k_max
            .ok_or_else(|| Failure::Usage("--k-max is required for the package check".into()))?;
        check_horizon("--k-max", k)?;
        check_horizon(
            "package horizon (k_max+1)*p",
            (k + 1).saturating_mul(p.get()),
        )?;
        Some(k)
    } else {
        None
    };
    let r_max = if want_prefix {
        let r = r_max
            .ok_or_else(|| Failure::Usage("--r-max is required for the prefix check".into()))?;
        if r < 3 {
            return Err(Error::Insufficient {
                what: "--r-max",
                got: u64::from(r),
                minimum: 3,
            }
            .into());
        }
        let top = p
            .get()
            .checked_pow(r)
            .filter(|&n| n <= MAX_HORIZON)
            .ok_or(Error::TooLarge {
                what: "p^r_max",
                got: u64::from(r),
                maximum: u64::from(MAX_HORIZON.ilog(p.get())),
            })?;
        Some((r, top))
    } else {
        None
    };
    let minimum = k_max
        .map(|k| min_precision_for_packages(p, k))
        .into_iter()
        .chain(
            r_max
                .map(|(r, _)| min_precision_for_prefix(p, r))
                .transpose()?,
        )
        .max()
        .unwrap_or(1) as usize;
    let precision = match digits {
        Some(n) => {
            let n = check_digits(n)?;
            if n < minimum {
                return Err(Error::Insufficient {
                    what: "--digits",
                    got: n as u64,
                    minimum: minimum as u64,
                }
                .into());
            }
            n
        }
        None => check_digits(minimum)?,
    };
    let prefix = match r_max {
        Some((r, top)) => {
            let horizon = freeze_horizon.unwrap_or(top.saturating_mul(4));
            check_horizon("--freeze-horizon", horizon)?;
            if horizon < top {
                return Err(Error::Insufficient {
                    what: "--freeze-horizon",
                    got: horizon,
                    minimum: top,
                }
                .into());
            }
            Some((r, precision, horizon))
        }
        None => None,
    };
    Ok((
        Plan {
            packages: k_max.map(|k| (k, precision)),
            prefix,
        },
        precision,
    ))
}

fn run_plan(p: Prime, plan: &Plan) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    if let Some((k, n)) = plan.packages {
        checks.push(Check::packages(p, k, n)?);
    }
    if let Some((r, n, h)) = plan.prefix {
        checks.push(Check::power_prefix(p, r, n, h)?);
    }
    Ok(checks)
}

fn summarize(checks: &[Check], err: &mut dyn Write) {
    for c in checks {
        let status = match c.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        let _ = writeln!(
            err,
            "{status}: {} ({} records, {} violations)",
            c.name,
            c.records.len(),
            c.violations.len()
        );
    }
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let p = prime(args.prime)?;
    let (plan, precision) = plan_checks(
        p,
        args.check,
        args.k_max,
        args.r_max,
        args.digits,
        args.freeze_horizon,
    )?;
    let checks = run_plan(p, &plan)?;
    let report = Report::new(p, precision, checks);
    if args.json {
        summarize(&report.checks, err);
        writeln!(out, "{}", report.to_json())?;
    } else {
        for c in &report.checks {
            let status = if c.pass == Some(false) {
                "FAIL"
            } else {
                "pass"
            };
            writeln!(
                out,
                "{status} {} ({} records, {} violations)",
                c.name,
                c.records.len(),
                c.violations.len()
            )?;
        }
    }
    Ok(if report.pass() { 0 } else { 1 })
}

fn cmd_report(args: ReportArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let p = prime(args.prime)?;
    let (plan, precision) = plan_checks(
        p,
        CheckKind::All,
        Some(args.k_max),
        Some(args.r_max),
        args.digits,
        args.freeze_horizon,
    )?;
    let search_digits = check_digits(args.search_digits)?;
    if args.max_period == 0 || args.min_repeats == 0 {
        return Err(Failure::Usage(
            "--max-period and --min-repeats must be positive".into(),
        ));
    }
    let bounds = DetectionBounds {
        max_preperiod: args.max_preperiod,
        max_period: args.max_period,
        min_repeats: args.min_repeats,
    };
    let mut checks = run_plan(p, &plan)?;
    checks.push(Check::nonperiodicity(p, search_digits, bounds)?);
    checks.push(Check::negative_control(p, search_digits, bounds)?);
    checks.push(Check::factorial_period(p, search_digits, bounds)?);
    summarize(&checks, err);
    let report = Report::new(p, precision, checks);
    emit(
        &format!("{}\n", report.to_json()),
        args.output.as_ref(),
        out,
    )?;
    Ok(if report.pass() { 0 } else { 1 })
}
