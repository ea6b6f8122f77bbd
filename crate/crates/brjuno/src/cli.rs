//! Command-line front end. `run` takes its streams as arguments so tests
//! can drive it in-process.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::Arc;

use brjuno_core::arith::parse_rational;
use brjuno_core::brjuno::{cylinder_bounds, eval_enclosure_sequence, eval_periodic, BrjunoSpec, SequenceOptions};
use brjuno_core::cf::{cylinder_enclosure, eval_point, DigitStream, DigitWord};
use brjuno_core::inversion::{invert, InvertOptions, Inversion};
use brjuno_core::map::{verify_conditions, MapModel, Scope, Verdict};
use brjuno_core::{Dyadic, Error, Interval, Rational};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{parse_map, parse_sign, parse_weight, BudgetConfig, Format, RunConfig, SpecConfig};
use crate::source::{LineOracle, MemoSource};
use crate::wilton::{wilton_sum, Trig};
use crate::{decimal, exit_code};

#[derive(Parser, Debug)]
#[command(name = "brjuno", version, about = "Certified evaluation and inversion of generalized Brjuno functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enclose Φ(x) for an eventually periodic x, or stream bounds for x read from stdin.
    Eval(EvalArgs),
    /// Build digits of x with Φ(x) = y from lower approximations y_n on stdin.
    Invert(InvertArgs),
    /// Check the expanding-map conditions (i)-(vii) and the weight conditions.
    VerifyMap(VerifyArgs),
    /// Write certified lower bounds of Φ over a grid of cylinders as CSV.
    Sample(SampleArgs),
    /// Partial sums of Σ d(n)/n cos(2πnx) or sin(2πnx).
    Wilton(WiltonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// JSON run configuration; flags given explicitly override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// gauss | alpha_cf
    #[arg(long)]
    pub map: Option<String>,
    /// α for alpha_cf, as a rational.
    #[arg(long)]
    pub alpha: Option<String>,
    /// log_pow:N | inverse | expr:<formula in x>
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// constant | alternating | periodic:1,-1,...
    #[arg(long)]
    pub sign: Option<String>,
    #[arg(long)]
    pub prec: Option<i64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Largest m + N tried by the insertion search.
    #[arg(long)]
    pub budget_search: Option<u64>,
    /// Precision cap in bits.
    #[arg(long)]
    pub budget_prec: Option<i64>,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// `head=[..];tail=ones`, `tail=periodic:[..]`, or `tail=stdin`.
    #[arg(long)]
    pub x: String,
    /// Every digit after the head is at most this; unlocks upper bounds.
    #[arg(long)]
    pub digit_bound: Option<u64>,
    /// Terms to consume for stdin tails.
    #[arg(long, default_value_t = 200)]
    pub terms: u64,
}

#[derive(Args, Debug)]
pub struct InvertArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 12)]
    pub steps: u32,
    /// Read y_n from this file instead of stdin.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Head of the infimum point x_* (required for custom maps).
    #[arg(long)]
    pub x_star: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Check branches 1..=N.
    #[arg(long, default_value_t = 1000)]
    pub branches: u64,
    /// Sample count for the weight derivative bound.
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    /// Largest N for the weight ratio condition.
    #[arg(long, default_value_t = 64)]
    pub ratio_n: u64,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long)]
    pub digit_bound: Option<u64>,
}

#[derive(Args, Debug)]
pub struct WiltonArgs {
    /// Digit stream (Gauss digits) or a rational p/q.
    #[arg(long)]
    pub x: String,
    #[arg(long, value_enum, default_value = "cos")]
    pub kind: TrigArg,
    #[arg(long, default_value_t = 1000)]
    pub terms: usize,
    #[arg(long, default_value_t = 40)]
    pub prec: i64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum TrigArg {
    Cos,
    Sin,
}

/// Failure of a command: a library error or an I/O problem.
enum Fail {
    Lib(Error),
    Io(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Fail {
        Fail::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Fail {
        Fail::Lib(Error::Parse(e.to_string()))
    }
}

type Stdin = Box<dyn BufRead + Send>;

pub fn run<I, T>(args: I, stdin: Stdin, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{}", e.render()) } else { write!(stderr, "{}", e.render()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a, stdin, stdout),
        Command::Invert(a) => cmd_invert(a, stdin, stdout),
        Command::VerifyMap(a) => cmd_verify(a, stdout),
        Command::Sample(a) => cmd_sample(a, stdout),
        Command::Wilton(a) => cmd_wilton(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Fail::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(Fail::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

impl SpecArgs {
    pub fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| Error::Parse(e.to_string()))?
            }
            None => RunConfig {
                spec: SpecConfig::brjuno(),
                prec: 53,
                budgets: BudgetConfig::default(),
                format: Format::Text,
            },
        };
        if self.map.is_some() || self.alpha.is_some() {
            cfg.spec.map = parse_map(self.map.as_deref().unwrap_or("alpha_cf"), self.alpha.as_deref())?;
        }
        if let Some(w) = &self.weight {
            cfg.spec.weight = parse_weight(w)?;
        }
        if let Some(nu) = &self.nu {
            parse_rational(nu)?;
            cfg.spec.nu = nu.clone();
        }
        if let Some(s) = &self.sign {
            cfg.spec.sign = parse_sign(s)?;
        }
        if let Some(p) = self.prec {
            if p <= 0 {
                return Err(Error::Parse("precision must be positive".into()));
            }
            cfg.prec = p;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(b) = self.budget_search {
            cfg.budgets.search = b;
        }
        if let Some(b) = self.budget_prec {
            cfg.budgets.prec = b;
        }
        cfg.budgets.build()?;
        Ok(cfg)
    }
}

/// Output sink: the `--out` file or stdout.
fn sink<'a>(out: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Fail> {
    Ok(match out {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(stdout),
    })
}

fn dump(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Fail> {
    writeln!(stdout, "{}", serde_json::to_string_pretty(cfg)?)?;
    Ok(0)
}

fn decimal_digits(prec: i64) -> u32 {
    ((prec as f64) * std::f64::consts::LOG10_2).ceil().clamp(1.0, 60.0) as u32 + 1
}

fn interval_json(v: &Interval, digits: u32) -> Value {
    json!({
        "lo": v.lo().to_string(),
        "hi": v.hi().to_string(),
        "lo_decimal": decimal(v.lo(), digits, false),
        "hi_decimal": decimal(v.hi(), digits, true),
    })
}

/// Digit-stream syntax plus `tail=stdin`.
enum XInput {
    Stream(DigitStream),
    Stdin(DigitWord),
}

fn parse_x(s: &str) -> Result<XInput, Error> {
    let t = s.trim();
    if let Some(head) = t.strip_suffix("tail=stdin") {
        let head = head.trim_end().trim_end_matches(';');
        let stream: DigitStream = format!("{head};tail=ones").parse()?;
        return Ok(XInput::Stdin(stream.head().clone()));
    }
    Ok(XInput::Stream(t.parse()?))
}

fn cmd_eval(a: EvalArgs, stdin: Stdin, stdout: &mut dyn Write) -> Result<i32, Fail> {
    let cfg = a.spec.resolve()?;
    if a.spec.dump_config {
        return dump(&cfg, stdout);
    }
    let spec = cfg.spec.build()?;
    let digits = decimal_digits(cfg.prec);
    let mut out = sink(&a.spec.out, stdout)?;
    match parse_x(&a.x)? {
        XInput::Stream(x) => {
            let v = eval_periodic(&spec, &x, cfg.prec)?;
            match cfg.format {
                Format::Json => writeln!(out, "{}", interval_json(&v, digits))?,
                _ => {
                    writeln!(out, "[{}, {}]", decimal(v.lo(), digits, false), decimal(v.hi(), digits, true))?;
                    writeln!(out, "exact {v}")?;
                }
            }
            Ok(0)
        }
        XInput::Stdin(head) => {
            let src = Arc::new(MemoSource::new(stdin));
            let x = DigitStream::generator(head, src.clone());
            let opts = SequenceOptions { digit_bound: a.digit_bound, ceiling: None, max_terms: Some(a.terms) };
            let mut code = 0;
            for step in eval_enclosure_sequence(&spec, &x, opts, cfg.prec)? {
                let step = match step {
                    Ok(s) => s,
                    // running out of digits ends the stream of bounds
                    Err(Error::InsufficientDigits { .. }) => break,
                    Err(e) => {
                        writeln!(out, "{}", json!({ "error": e.to_string() }))?;
                        code = exit_code(&e);
                        break;
                    }
                };
                let hi = step.hi.as_ref().map(|h| h.to_string());
                match cfg.format {
                    Format::Json => writeln!(out, "{}", json!({ "k": step.k, "lo": step.lo.to_string(), "hi": hi }))?,
                    _ => {
                        let hi = step.hi.as_ref().map(|h| decimal(h, digits, true)).unwrap_or_else(|| "inf".into());
                        writeln!(out, "k={} lo={} hi={}", step.k, decimal(&step.lo, digits, false), hi)?;
                    }
                }
            }
            if let Some(e) = src.error() {
                return Err(e.into());
            }
            Ok(code)
        }
    }
}

fn audit_lines(r: &Inversion) -> Vec<Value> {
    r.audit
        .iter()
        .map(|a| {
            let mut cert = String::new();
            if a.cert4 {
                cert.push_str("(4)");
            }
            if a.cert5_increase() {
                cert.push_str("(5)");
            }
            if a.cert6 {
                cert.push_str("(6)");
            }
            json!({
                "k": a.k,
                "head": a.head.digits(),
                "phi_lo": a.phi.lo().to_string(),
                "phi_hi": a.phi.hi().to_string(),
                "y_sk": a.y_sk.to_string(),
                "cert": cert,
                "window": [a.window.0.to_string(), a.window.1.to_string()],
                "increase_margin": a.increase_margin.as_ref().map(|m| m.to_string()),
                "printed_5_margin": a.decrease_margin.as_ref().map(|m| m.to_string()),
                "cylinder_lower": a.cylinder_lower.to_string(),
                "substeps": a.substeps,
                "pad": a.pad,
            })
        })
        .collect()
}

fn cmd_invert(a: InvertArgs, stdin: Stdin, stdout: &mut dyn Write) -> Result<i32, Fail> {
    let cfg = a.spec.resolve()?;
    if a.spec.dump_config {
        return dump(&cfg, stdout);
    }
    let spec = cfg.spec.build()?;
    let x_star = match &a.x_star {
        Some(s) => Some(s.parse::<DigitWord>()?),
        None => None,
    };
    let opts = InvertOptions { x_star, budgets: cfg.budgets.build()? };
    let reader: Stdin = match &a.oracle {
        Some(p) => Box::new(BufReader::new(fs::File::open(p)?)),
        None => stdin,
    };
    let mut oracle = LineOracle::new(reader);
    let r = invert(&spec, &mut oracle, a.steps, cfg.prec, &opts)?;
    if let Some(e) = oracle.error() {
        return Err(e.into());
    }
    let code = match &r.stopped {
        Some(e) => exit_code(e),
        None if r.all_certified() => 0,
        None => 1,
    };
    let digits = decimal_digits(cfg.prec);
    let mut out = sink(&a.spec.out, stdout)?;
    match cfg.format {
        Format::Json => {
            for line in audit_lines(&r) {
                writeln!(out, "{line}")?;
            }
            let summary = json!({
                "digits": r.digits.digits(),
                "trivial": r.trivial,
                "epsilon": r.epsilon.as_ref().map(|e| e.to_string()),
                "s": r.s,
                "phi": r.final_phi.as_ref().map(|v| interval_json(v, digits)),
                "point": r.point.as_ref().map(|v| interval_json(v, digits)),
                "stopped": r.stopped.as_ref().map(|e| e.to_string()),
                "certified": r.all_certified(),
            });
            writeln!(out, "{summary}")?;
        }
        _ => {
            writeln!(out, "digits {}", r.digits)?;
            if r.trivial {
                writeln!(out, "trivial case: the target is not separated from Φ(x_*)")?;
            }
            if let Some(v) = &r.final_phi {
                writeln!(out, "phi [{}, {}]", decimal(v.lo(), digits, false), decimal(v.hi(), digits, true))?;
            }
            if let Some(p) = &r.point {
                writeln!(out, "x [{}, {}]", decimal(p.lo(), digits, false), decimal(p.hi(), digits, true))?;
            }
            for line in audit_lines(&r) {
                writeln!(out, "step {} cert {} pad {} substeps {}", line["k"], line["cert"].as_str().unwrap_or(""), line["pad"], line["substeps"])?;
            }
            if let Some(e) = &r.stopped {
                writeln!(out, "stopped: {e}")?;
            }
        }
    }
    Ok(code)
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Unchecked => "unchecked",
    }
}

fn scope(s: Scope) -> &'static str {
    match s {
        Scope::Symbolic => "symbolic",
        Scope::RangeLimited => "range-limited",
        Scope::ByConstruction => "by-construction",
    }
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<i32, Fail> {
    let cfg = a.spec.resolve()?;
    if a.spec.dump_config {
        return dump(&cfg, stdout);
    }
    let spec = cfg.spec.build()?;
    let map = spec.map();
    let report = verify_conditions(map, a.branches, cfg.prec)?;
    let deriv = spec.weight().derivative_bound_check(a.samples, cfg.prec)?;
    let ratio = spec.weight().ratio_condition_check(map, a.ratio_n, cfg.prec)?;
    let opt = |q: &Option<Rational>| q.as_ref().map(|q| q.to_string());
    let conditions: Vec<Value> = report
        .conditions
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "verdict": verdict(c.verdict),
                "scope": scope(c.scope),
                "margin": c.margin.as_ref().map(|m| m.to_string()),
                "witness": c.witness,
                "note": c.note,
            })
        })
        .collect();
    let mut out = sink(&a.spec.out, stdout)?;
    match cfg.format {
        Format::Json => {
            let v = json!({
                "branches": [report.branch_range.0, report.branch_range.1],
                "kappa": report.kappa,
                "tau": opt(&report.tau),
                "sigma": opt(&report.sigma),
                "d": opt(&report.d),
                "m_g": opt(&report.m_g),
                "conditions": conditions,
                "weight": {
                    "derivative": {
                        "pass": deriv.pass,
                        "c": deriv.c.to_string(),
                        "auto_fitted": deriv.auto_fitted,
                        "sup": deriv.sup.to_string(),
                        "pieces": deriv.pieces,
                    },
                    "ratio": {
                        "pass": ratio.pass,
                        "vacuous": ratio.vacuous,
                        "n_max": ratio.n_max,
                        "first_failure": ratio.first_failure,
                    },
                },
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        _ => {
            let (lo, hi) = report.branch_range;
            writeln!(out, "branches {lo}..{hi}, kappa {}", report.kappa)?;
            writeln!(out, "{:<6} {:<10} {:<16} {:<12} {:<8} note", "cond", "verdict", "scope", "margin", "witness")?;
            for c in &report.conditions {
                let margin = c.margin.as_ref().map(|m| decimal(m, 6, false)).unwrap_or_else(|| "-".into());
                let witness = c.witness.map(|w| w.to_string()).unwrap_or_else(|| "-".into());
                writeln!(out, "{:<6} {:<10} {:<16} {:<12} {:<8} {}", c.name, verdict(c.verdict), scope(c.scope), margin, witness, c.note)?;
            }
            let fitted = if deriv.auto_fitted { " (fitted)" } else { "" };
            writeln!(out, "weight |u'| (x-s0)^2 <= C: {} with C = {}{fitted}", if deriv.pass { "pass" } else { "fail" }, deriv.c)?;
            let vac = if ratio.vacuous { " (vacuous)" } else { "" };
            writeln!(out, "weight ratio condition up to N = {}: {}{vac}", ratio.n_max, if ratio.pass { "pass" } else { "fail" })?;
        }
    }
    Ok(if report.any_fail() || !deriv.pass || !ratio.pass { 1 } else { 0 })
}

/// Word of length `depth` of the point `s0 + (j + 1/√2)(s1 - s0)/grid`.
fn grid_word(map: &MapModel, j: usize, grid: usize, depth: usize) -> Result<DigitWord, Error> {
    let mut wp = 64 + 8 * depth as i64;
    loop {
        let r = (|| -> Result<DigitWord, Error> {
            let half = Interval::from_rational(&Rational::new(1.into(), 2.into()), wp);
            let theta = half.pow(&Rational::new(1.into(), 2.into()), wp)?;
            let span = Interval::from_rational(&(map.s1() - map.s0()), wp);
            let base = Interval::from_rational(map.s0(), wp);
            let t = Interval::from_i64(j as i64).add(&theta).mul(&span).div(&Interval::from_i64(grid as i64), wp)?;
            let mut x = base.add(&t);
            let mut w = DigitWord::empty();
            for _ in 0..depth {
                let d = map.locate(&x)?;
                w.push(d)?;
                x = map.apply(&x, wp)?;
            }
            Ok(w)
        })();
        match r {
            Err(Error::BranchStraddle) | Err(Error::Domain(_)) if wp < 8192 => wp *= 2,
            other => return other,
        }
    }
}

fn cmd_sample(a: SampleArgs, stdout: &mut dyn Write) -> Result<i32, Fail> {
    let cfg = a.spec.resolve()?;
    if a.spec.dump_config {
        return dump(&cfg, stdout);
    }
    if a.grid < 2 || a.depth == 0 {
        return Err(Error::Domain("need grid >= 2 and depth >= 1".into()).into());
    }
    let spec = cfg.spec.build()?;
    let rows = sample_rows(&spec, a.grid, a.depth, a.digit_bound, cfg.prec)?;
    let mut out = sink(&a.spec.out, stdout)?;
    let two_sided = a.digit_bound.is_some();
    writeln!(out, "cylinder,word,x_mid,phi_lo{}", if two_sided { ",phi_hi" } else { "" })?;
    for r in rows {
        write!(out, "{},{},{},{}", r.0, r.1, r.2, r.3)?;
        if let Some(h) = r.4 {
            write!(out, ",{h}")?;
        }
        writeln!(out)?;
    }
    Ok(0)
}

type Row = (usize, String, String, String, Option<String>);

/// Rows are computed on worker threads and collected in grid order.
fn sample_rows(spec: &BrjunoSpec, grid: usize, depth: usize, bound: Option<u64>, prec: i64) -> Result<Vec<Row>, Error> {
    let row = |j: usize| -> Result<Row, Error> {
        let word = grid_word(spec.map(), j, grid, depth)?;
        let cyl = cylinder_enclosure(spec.map(), &word, prec + 8)?;
        let mid = (&cyl.lo_exact + &cyl.hi_exact) / Rational::from_integer(2.into());
        let mid = Dyadic::from_rational_floor(&mid, prec + 8);
        let (lo, hi) = cylinder_bounds(spec, &word, bound, prec + 8)?;
        let text = word.digits().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
        Ok((j, text, decimal(&mid, 12, false), decimal(&lo, 12, false), hi.map(|h| decimal(&h, 12, true))))
    };
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(grid);
    let chunk = grid.div_ceil(workers);
    let parts: Vec<Result<Vec<Row>, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let row = &row;
                s.spawn(move || (w * chunk..((w + 1) * chunk).min(grid)).map(row).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sample worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(grid);
    for p in parts {
        rows.extend(p?);
    }
    Ok(rows)
}

fn cmd_wilton(a: WiltonArgs, stdout: &mut dyn Write) -> Result<i32, Fail> {
    if a.terms == 0 || a.prec <= 0 {
        return Err(Error::Parse("need --terms >= 1 and --prec >= 1".into()).into());
    }
    let bits = 64 - (a.terms as u64).leading_zeros() as i64;
    let wp = a.prec + bits + 24;
    let x = if a.x.contains("head=") {
        match parse_x(&a.x)? {
            XInput::Stream(s) => eval_point(&MapModel::gauss(), &s, wp)?,
            XInput::Stdin(_) => return Err(Error::Domain("wilton needs an eventually periodic x".into()).into()),
        }
    } else {
        Interval::from_rational(&parse_rational(&a.x)?, wp)
    };
    let kind = match a.kind {
        TrigArg::Cos => Trig::Cos,
        TrigArg::Sin => Trig::Sin,
    };
    let v = wilton_sum(&x, kind, a.terms, a.prec)?;
    let digits = decimal_digits(a.prec);
    match a.format {
        Format::Json => {
            let mut j = interval_json(&v, digits);
            j["kind"] = json!(format!("{:?}", a.kind).to_lowercase());
            j["terms"] = json!(a.terms);
            writeln!(stdout, "{j}")?;
        }
        _ => {
            writeln!(stdout, "illustrative only: a finite partial sum; its link to W1(x) < inf is an asymptotic statement, not a finite-M identity")?;
            writeln!(stdout, "sum_(n<={}) d(n)/n {}(2 pi n x) in [{}, {}]", a.terms, format!("{:?}", a.kind).to_lowercase(), decimal(v.lo(), digits, false), decimal(v.hi(), digits, true))?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let stdin: Stdin = Box::new(std::io::Cursor::new(input.as_bytes().to_vec()));
        let mut full = vec!["brjuno"];
        full.extend_from_slice(args);
        let code = run(full, stdin, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_golden_mean() {
        let (code, out, _) = run_str(&["eval", "--x", "head=[];tail=ones", "--prec", "30"], "");
        assert_eq!(code, 0);
        assert!(out.starts_with("[1.2598289"), "{out}");
        let (_, same, _) = run_str(&["eval", "--x", "head=[1];tail=ones", "--prec", "30"], "");
        assert_eq!(out.lines().next(), same.lines().next());
        let (_, alt, _) = run_str(&["eval", "--sign", "alternating", "--x", "head=[];tail=ones", "--prec", "30"], "");
        assert!(alt.starts_with("[0.29740"), "{alt}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["eval", "--x", "head=[0];tail=ones"], "").0, 3);
        assert_eq!(run_str(&["eval", "--x", "nonsense"], "").0, 2);
        assert_eq!(run_str(&["eval", "--nu", "-1", "--x", "head=[];tail=ones"], "").0, 3);
        assert_eq!(run_str(&["invert", "--steps", "2"], "0\n-1\n").0, 4);
        assert_eq!(run_str(&["wilton", "--x", "head=[];tail=ones", "--terms", "3"], "").0, 0);
    }

    #[test]
    fn stdin_tail_streams_bounds() {
        let (code, out, _) = run_str(&["eval", "--format", "json", "--x", "head=[2];tail=stdin", "--digit-bound", "5"], "1\n3\n5\n2\n");
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
        assert!(out.lines().all(|l| l.contains("\"hi\":\"")));
    }

    #[test]
    fn config_round_trip_and_dump() {
        let (code, out, _) = run_str(&["eval", "--x", "head=[]", "--map", "alpha_cf", "--alpha", "1/2", "--dump-config"], "");
        assert_eq!(code, 0);
        let cfg: RunConfig = serde_json::from_str(&out).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&serde_json::to_string(&cfg).unwrap()).unwrap(), cfg);
    }
}
