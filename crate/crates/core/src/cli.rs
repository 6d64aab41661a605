//! The `haftools` command line.
//!
//! Results go to stdout and are byte-identical between runs; wall-clock
//! timings go to stderr unless `--timing` asks for them in the output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 fixture mismatch,
//! 64 usage or input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::matchings::{Family, MatchingTable, Method};
use crate::matrix::Template;
use crate::ring::{BiPoly, BigInt, RingElement};
use crate::twoparam::{
    hafnian_c_counted, hafnian_d_counted, hafnian_j, sequence, TwoParamSpec, TwoParamTemplate,
};
use crate::verify::{self, fixtures, Impls, Level};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_FIXTURE_MISMATCH: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable overriding the enumeration cap.
pub const MAX_BRUTE_ENV: &str = "HAFTOOLS_MAX_BRUTE";
pub const DEFAULT_MAX_BRUTE: usize = 14;

/// Replaces the verified routines with a known-bad variant (test hook).
pub const INJECT_FAULT_ENV: &str = "HAFTOOLS_INJECT_FAULT";

#[derive(Parser, Debug)]
#[command(
    name = "haftools",
    version,
    about = "Exact hafnians of two-parameter matrices"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,
    /// Include wall-clock timings in the output.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of k-edge matching counts of Γ(C_n) or Γ(D_n), 0 ≤ n ≤ N.
    Table {
        #[arg(value_enum, ignore_case = true)]
        kind: FamilyArg,
        n_max: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        /// Compare the overlapping cells with the bundled table.
        #[arg(long)]
        check_fixture: bool,
    },
    /// Hafnian of T_{2m}(a, b). KIND is C, D, J or the path of a template file.
    /// For J the matrix is J_{2m}(b), every off-diagonal entry equal to b.
    /// A and B are integers or `sym` for the formal symbols a and b.
    Hafnian {
        kind: String,
        m: usize,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Hf(T_2(a, b)), …, Hf(T_{2M}(a, b)), one value per line.
    Sequence {
        #[arg(value_enum, ignore_case = true)]
        kind: FamilyArg,
        m_max: usize,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// Compare with the bundled first ten terms (a = 0, b = 1 only).
        #[arg(long)]
        check_fixture: bool,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
    /// Count scalar operations of the closed-form hafnian over a list of m.
    Bench {
        #[arg(value_enum, ignore_case = true)]
        kind: FamilyArg,
        #[arg(value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    C,
    D,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::C => Family::C,
            FamilyArg::D => Family::D,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Closed,
    Recurrence,
    Series,
    Brute,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Closed => Method::Closed,
            MethodArg::Recurrence => Method::Recurrence,
            MethodArg::Series => Method::Series,
            MethodArg::Brute => Method::Brute,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// Result payload of a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Scalar(String),
    List(Vec<String>),
    /// Rows indexed by `k`, columns by `n`; every cell in full decimal.
    Table(Vec<Vec<String>>),
}

/// One command's output in JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub result: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl OutputRecord {
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: Format,
    timing: bool,
    started: Instant,
}

impl Ctx<'_> {
    fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1e3
    }

    fn emit(&mut self, text: &str) -> Result<(), Failure> {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("write failed: {e}")))
    }

    fn emit_record(
        &mut self,
        command: &str,
        params: BTreeMap<String, String>,
        result: Payload,
    ) -> Result<(), Failure> {
        let timing_ms = self.timing.then(|| self.elapsed_ms());
        let record = OutputRecord {
            command: command.into(),
            params,
            result,
            timing_ms,
        };
        let text = record.render() + "\n";
        self.emit(&text)
    }

    fn report_timing(&mut self) -> Result<(), Failure> {
        if self.timing && self.format == Format::Csv {
            let line = format!("# elapsed_ms {:.3}\n", self.elapsed_ms());
            self.emit(&line)?;
        }
        Ok(())
    }
}

fn max_brute() -> usize {
    std::env::var(MAX_BRUTE_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_BRUTE)
}

/// Parses an integer, or `sym` / `a` / `b` for a formal symbol.
/// `sym` stands for the symbol matching the argument position.
fn parse_param(text: &str, position: char) -> Result<RingElement, Failure> {
    match text {
        "sym" if position == 'a' => Ok(RingElement::Poly(BiPoly::a())),
        "sym" => Ok(RingElement::Poly(BiPoly::b())),
        "a" => Ok(RingElement::Poly(BiPoly::a())),
        "b" => Ok(RingElement::Poly(BiPoly::b())),
        other => other.parse::<BigInt>().map(RingElement::Int).map_err(|_| {
            Failure::usage(format!(
                "{position}: expected an integer or `sym`, got {other:?}"
            ))
        }),
    }
}

fn parse_int_param(text: &str, position: char) -> Result<BigInt, Failure> {
    text.parse()
        .map_err(|_| Failure::usage(format!("{position}: expected an integer, got {text:?}")))
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Runs the CLI with explicit argument list and output streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let mut ctx = Ctx {
        out,
        err,
        format: cli.format,
        timing: cli.timing,
        started: Instant::now(),
    };
    let result = match cli.command {
        Command::Table {
            kind,
            n_max,
            method,
            check_fixture,
        } => cmd_table(&mut ctx, kind.into(), n_max, method.into(), check_fixture),
        Command::Hafnian { kind, m, a, b } => cmd_hafnian(&mut ctx, &kind, m, &a, &b),
        Command::Sequence {
            kind,
            m_max,
            a,
            b,
            check_fixture,
        } => cmd_sequence(&mut ctx, kind.into(), m_max, &a, &b, check_fixture),
        Command::Verify { level } => cmd_verify(
            &mut ctx,
            match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            },
        ),
        Command::Bench { kind, m_list } => cmd_bench(&mut ctx, kind.into(), &m_list),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.err, "haftools: {}", f.message);
            f.code
        }
    }
}

fn cmd_table(
    ctx: &mut Ctx,
    family: Family,
    n_max: usize,
    method: Method,
    check_fixture: bool,
) -> Result<i32, Failure> {
    if method == Method::Brute {
        let cap = max_brute();
        if n_max > cap {
            return Err(Failure::usage(format!(
                "brute-force enumeration is capped at n_max = {cap} (set {MAX_BRUTE_ENV} to raise it)"
            )));
        }
    }
    let table = MatchingTable::compute(family, n_max, method);
    match ctx.format {
        Format::Csv => ctx.emit(&table.to_csv())?,
        Format::Json => {
            let rows = table
                .grid()
                .iter()
                .map(|row| row.iter().map(|v| v.to_string()).collect())
                .collect();
            let p = params(&[
                ("kind", family.name().into()),
                ("n_max", n_max.to_string()),
                ("method", method.name().into()),
            ]);
            ctx.emit_record("table", p, Payload::Table(rows))?;
        }
    }
    ctx.report_timing()?;
    if check_fixture {
        let name = format!("table_{}.csv", family.name().to_lowercase());
        let text =
            fixtures::load(&name).map_err(|e| Failure::usage(format!("fixture {name}: {e}")))?;
        let expected = verify::parse_table_csv(&text).map_err(Failure::usage)?;
        for (k, row) in expected.iter().enumerate() {
            for (n, v) in row.iter().enumerate().take(n_max + 1) {
                let got = table.get(n, k);
                if &got != v {
                    let _ = writeln!(
                        ctx.err,
                        "fixture mismatch at n={n} k={k}: got {got}, expected {v}"
                    );
                    return Ok(EXIT_FIXTURE_MISMATCH);
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_hafnian(ctx: &mut Ctx, kind: &str, m: usize, a: &str, b: &str) -> Result<i32, Failure> {
    let a_val = parse_param(a, 'a')?;
    let b_val = parse_param(b, 'b')?;
    let value = match kind {
        "C" | "c" => TwoParamSpec {
            template: TwoParamTemplate::C,
            m,
            a: a_val,
            b: b_val,
        }
        .hafnian()?,
        "D" | "d" => TwoParamSpec {
            template: TwoParamTemplate::D,
            m,
            a: a_val,
            b: b_val,
        }
        .hafnian()?,
        "J" | "j" => hafnian_j(m, &b_val),
        path => {
            let text = std::fs::read_to_string(PathBuf::from(path))
                .map_err(|e| Failure::usage(format!("cannot read template {path:?}: {e}")))?;
            let template = Template::parse(&text)?;
            let n = template.order();
            if n % 2 != 0 {
                return Err(crate::error::Error::OddOrder(n).into());
            }
            if n != 2 * m {
                return Err(Failure::usage(format!(
                    "template order {n} does not match 2m = {}",
                    2 * m
                )));
            }
            let cap = max_brute();
            if n > cap {
                return Err(Failure::usage(format!(
                    "custom templates are enumerated; order {n} exceeds the cap {cap} (set {MAX_BRUTE_ENV})"
                )));
            }
            TwoParamSpec {
                template: TwoParamTemplate::Custom(template),
                m,
                a: a_val,
                b: b_val,
            }
            .hafnian()?
        }
    };
    let rendered = value.to_string();
    match ctx.format {
        Format::Csv => ctx.emit(&format!("{rendered}\n"))?,
        Format::Json => {
            let p = params(&[
                ("kind", kind.into()),
                ("m", m.to_string()),
                ("a", a.into()),
                ("b", b.into()),
            ]);
            ctx.emit_record("hafnian", p, Payload::Scalar(rendered))?;
        }
    }
    ctx.report_timing()?;
    Ok(EXIT_OK)
}

fn cmd_sequence(
    ctx: &mut Ctx,
    family: Family,
    m_max: usize,
    a: &str,
    b: &str,
    check_fixture: bool,
) -> Result<i32, Failure> {
    if m_max < 1 {
        return Err(Failure::usage("m_max must be at least 1"));
    }
    let a_val = parse_int_param(a, 'a')?;
    let b_val = parse_int_param(b, 'b')?;
    let values = sequence(family, m_max, &a_val, &b_val);
    let rendered: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    match ctx.format {
        Format::Csv => {
            let mut text = String::new();
            for v in &rendered {
                text.push_str(v);
                text.push('\n');
            }
            ctx.emit(&text)?;
        }
        Format::Json => {
            let p = params(&[
                ("kind", family.name().into()),
                ("m_max", m_max.to_string()),
                ("a", a.into()),
                ("b", b.into()),
            ]);
            ctx.emit_record("sequence", p, Payload::List(rendered))?;
        }
    }
    ctx.report_timing()?;
    if check_fixture {
        if !(a_val.is_zero() && b_val == BigInt::from(1)) {
            return Err(Failure::usage("--check-fixture needs a = 0 and b = 1"));
        }
        let name = format!("sequence_{}.csv", family.name().to_lowercase());
        let text =
            fixtures::load(&name).map_err(|e| Failure::usage(format!("fixture {name}: {e}")))?;
        let expected = verify::parse_sequence_csv(&text).map_err(Failure::usage)?;
        for (i, (got, want)) in values.iter().zip(&expected).enumerate() {
            if got != want {
                let _ = writeln!(
                    ctx.err,
                    "fixture mismatch at m={}: got {got}, expected {want}",
                    i + 1
                );
                return Ok(EXIT_FIXTURE_MISMATCH);
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(ctx: &mut Ctx, level: Level) -> Result<i32, Failure> {
    let impls = match std::env::var(INJECT_FAULT_ENV).as_deref() {
        Ok("binomial") => Impls::with_flipped_binomial(),
        Ok(other) => return Err(Failure::usage(format!("unknown fault {other:?}"))),
        Err(_) => Impls::default(),
    };
    let results = verify::run_suites(&impls, level);
    let all_passed = results.iter().all(|r| r.passed());
    match ctx.format {
        Format::Csv => {
            let mut text = String::new();
            for r in &results {
                text.push_str(&r.line());
                if ctx.timing {
                    text.push_str(&format!(" [{:.1} ms]", r.millis));
                }
                text.push('\n');
            }
            text.push_str(if all_passed {
                "all suites passed\n"
            } else {
                "verification FAILED\n"
            });
            ctx.emit(&text)?;
        }
        Format::Json => {
            let lines = results.iter().map(|r| r.line()).collect();
            let level_name = if level == Level::Quick {
                "quick"
            } else {
                "full"
            };
            ctx.emit_record(
                "verify",
                params(&[("level", level_name.into())]),
                Payload::List(lines),
            )?;
        }
    }
    Ok(if all_passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Operation count of one closed-form evaluation at `a = 2`, `b = 1`.
pub fn bench_ops(family: Family, m: usize) -> crate::ring::OpCounter {
    let (a, b) = (BigInt::from(2), BigInt::from(1));
    match family {
        Family::C => hafnian_c_counted(m, &a, &b).1,
        Family::D => hafnian_d_counted(m, &a, &b).1,
    }
}

fn cmd_bench(ctx: &mut Ctx, family: Family, m_list: &[usize]) -> Result<i32, Failure> {
    if m_list.contains(&0) {
        return Err(Failure::usage("bench needs m >= 1"));
    }
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &m in m_list {
        let start = Instant::now();
        let ops = bench_ops(family, m);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let _ = writeln!(ctx.err, "{family} m={m}: {ms:.3} ms");
        points.push((m as f64, ops.total() as f64));
        rows.push((m, ops, ms));
    }
    let slope = log_log_slope(&points);
    let slope_text = slope.map_or("n/a".to_string(), |s| format!("{s:.3}"));
    match ctx.format {
        Format::Csv => {
            let mut text = String::from(if ctx.timing {
                "m,ops,ring_ops,binomial_steps,wall_ms\n"
            } else {
                "m,ops,ring_ops,binomial_steps\n"
            });
            for (m, ops, ms) in &rows {
                text.push_str(&format!(
                    "{m},{},{},{}",
                    ops.total(),
                    ops.ring_ops,
                    ops.binomial_steps
                ));
                if ctx.timing {
                    text.push_str(&format!(",{ms:.3}"));
                }
                text.push('\n');
            }
            text.push_str(&format!("slope,{slope_text}\n"));
            ctx.emit(&text)?;
        }
        Format::Json => {
            let table = rows
                .iter()
                .map(|(m, ops, _)| vec![m.to_string(), ops.total().to_string()])
                .collect();
            let list: Vec<String> = m_list.iter().map(|m| m.to_string()).collect();
            let p = params(&[
                ("kind", family.name().into()),
                ("m_list", list.join(",")),
                ("slope", slope_text),
            ]);
            ctx.emit_record("bench", p, Payload::Table(table))?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("haftools").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn hafnian_examples() {
        assert_eq!(
            run_capture(&["hafnian", "C", "3", "0", "1"]),
            (0, "7\n".into(), String::new())
        );
        assert_eq!(
            run_capture(&["hafnian", "D", "2", "sym", "sym"]).1,
            "2a^2 + ab\n"
        );
        assert_eq!(run_capture(&["hafnian", "J", "2", "0", "5"]).1, "75\n");
        assert_eq!(run_capture(&["hafnian", "C", "2", "-1", "3"]).0, 0);
    }

    #[test]
    fn symbolic_mixed_arguments() {
        // a symbolic, b = 1: polynomial in a only
        let (code, out, _) = run_capture(&["hafnian", "C", "2", "sym", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "a^2 + 2\n");
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run_capture(&["table", "X", "3"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["hafnian", "C", "3", "zz", "1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["sequence", "C", "0", "0", "1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["hafnian", "/nonexistent/template.txt", "2", "0", "1"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0]
            .iter()
            .map(|&x| (x, 5.0 * x.powi(3)))
            .collect();
        assert!((log_log_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&pts[..1]), None);
    }

    #[test]
    fn record_round_trip() {
        let record = OutputRecord {
            command: "table".into(),
            params: params(&[("kind", "C".into())]),
            result: Payload::Table(vec![vec!["1".into(), "0".into()]]),
            timing_ms: Some(1.25),
        };
        assert_eq!(OutputRecord::parse(&record.render()).unwrap(), record);
    }
}
