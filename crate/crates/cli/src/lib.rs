//! `thetadim`: dimension lookups, identity sweeps, tables and symbolic
//! factorizations from the command line.
//!
//! Exit codes: 0 success, 1 check failure, 2 unsupported input or violated
//! precondition, 3 certification failure, 64 usage error.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use theta_dims::duality::{grid_sweep, CheckName, CheckReport, GridBounds};
use theta_dims::exact_arith::{EvalConfig, DEFAULT_MAX_PRECISION_BITS};
use theta_dims::theta_calculus::{
    pullback_split, standard_jacobian_pullback, theta_rescale, FormalLineClass, ThetaDescriptor,
    ThetaError,
};
use theta_dims::verlinde::{DimResult, Engine, VerlindeError, VerlindeQuery};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "thetadim",
    version,
    about = "Dimensions of spaces of non-abelian theta functions"
)]
pub struct Cli {
    /// Precision ceiling for certified trigonometric sums
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_PRECISION_BITS)]
    pub max_precision_bits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of level-k theta functions for SL(n) or GL(n)
    Dim(DimArgs),
    /// Run an identity check over a parameter grid
    Check(CheckArgs),
    /// Table of s(n,0,k) at a fixed genus
    Table(TableArgs),
    /// Print a theta-bundle factorization
    Factor {
        #[command(subcommand)]
        subject: FactorSubject,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sl,
    Gl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    pub kind: Kind,
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub rank: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub degree: i64,
    #[arg(long)]
    pub level: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_parser = parse_check)]
    pub name: CheckName,
    #[arg(long)]
    pub max_rank: u64,
    #[arg(long)]
    pub max_level: u64,
    /// Inclusive genus range `A..B` (or a single genus)
    #[arg(long, value_parser = parse_genus_range)]
    pub genus_range: (u32, u32),
    #[arg(long, default_value_t = 0)]
    pub max_abs_degree: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub max_rank: u64,
    #[arg(long)]
    pub max_level: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum FactorSubject {
    /// Pullback of theta_F along SM(n1, L1) x M(n2, d2)
    Pullback {
        #[arg(long)]
        n1: u64,
        #[arg(long, allow_negative_numbers = true)]
        d1: i64,
        #[arg(long)]
        n2: u64,
        #[arg(long = "rkF")]
        rk_f: u64,
        /// Degree of det F
        #[arg(long = "degF", default_value_t = 0, allow_negative_numbers = true)]
        deg_f: i64,
    },
    /// theta_F in terms of theta_F0
    Rescale {
        #[arg(long = "rkF")]
        rk_f: u64,
        #[arg(long = "rkF0")]
        rk_f0: u64,
        #[arg(long = "degF", default_value_t = 0, allow_negative_numbers = true)]
        deg_f: i64,
        #[arg(long = "degF0", default_value_t = 0, allow_negative_numbers = true)]
        deg_f0: i64,
    },
    /// Pullback of a minimal theta bundle to SM(n, L) x J
    Jacobian {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        rank: u64,
        #[arg(long, allow_negative_numbers = true)]
        degree: i64,
    },
}

fn parse_check(s: &str) -> Result<CheckName, String> {
    s.parse::<CheckName>().map_err(|e| e.to_string())
}

fn parse_genus_range(s: &str) -> Result<(u32, u32), String> {
    let parse = |x: &str| {
        x.trim()
            .parse::<u32>()
            .map_err(|e| format!("bad genus {x:?}: {e}"))
    };
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let g = parse(s)?;
            Ok((g, g))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEcho {
    pub g: u32,
    pub n: u64,
    pub d: i64,
    pub k: u64,
    pub kind: Kind,
}

/// One dimension answer as emitted by `dim --format json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub query: QueryEcho,
    pub value: String,
    pub method: String,
    pub certified: bool,
}

impl OutputRecord {
    pub fn new(q: &VerlindeQuery, kind: Kind, result: &DimResult) -> Self {
        Self {
            query: QueryEcho {
                g: q.genus(),
                n: q.rank(),
                d: q.degree(),
                k: q.level(),
                kind,
            },
            value: result.value.to_string(),
            method: result.method.as_str().into(),
            certified: result.certified,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    if cli.max_precision_bits == 0 {
        let _ = writeln!(err, "error: --max-precision-bits must be positive");
        return EXIT_USAGE;
    }
    let engine = Engine::new(EvalConfig::with_max_precision_bits(cli.max_precision_bits));
    let result = match cli.command {
        Command::Dim(a) => cmd_dim(&engine, &a, out),
        Command::Check(a) => cmd_check(&engine, &a, out),
        Command::Table(a) => cmd_table(&engine, &a, out),
        Command::Factor { subject } => cmd_factor(&subject, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError { code, message }) => {
            let _ = writeln!(err, "{message}");
            code
        }
    }
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: format!("error: {}", message.into()),
        }
    }
}

impl From<VerlindeError> for CliError {
    fn from(e: VerlindeError) -> Self {
        match e {
            VerlindeError::Unsupported { .. } => CliError {
                code: EXIT_UNSUPPORTED,
                message: format!("unsupported: {e}"),
            },
            VerlindeError::InvalidQuery(m) => CliError::usage(m),
            other => CliError {
                code: EXIT_CERTIFICATION,
                message: format!("error: {other}"),
            },
        }
    }
}

impl From<ThetaError> for CliError {
    fn from(e: ThetaError) -> Self {
        CliError {
            code: EXIT_UNSUPPORTED,
            message: format!("error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: format!("error: {e}"),
        }
    }
}

fn cmd_dim(engine: &Engine, a: &DimArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let q = VerlindeQuery::new(a.genus, a.rank, a.degree, a.level)?;
    let result = match a.kind {
        Kind::Sl => engine.sl_dim(&q)?,
        Kind::Gl => engine.gl_dim(&q)?,
    };
    match a.format {
        Format::Text => writeln!(out, "{}", result.value)?,
        Format::Json => {
            let record = OutputRecord::new(&q, a.kind, &result);
            writeln!(
                out,
                "{}",
                serde_json::to_string(&record).expect("record serializes")
            )?;
        }
        other => {
            return Err(CliError::usage(format!(
                "dim does not support {other:?} output"
            )))
        }
    }
    Ok(EXIT_OK)
}

fn cmd_check(engine: &Engine, a: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let bounds = GridBounds {
        max_rank: a.max_rank,
        max_level: a.max_level,
        genus_min: a.genus_range.0,
        genus_max: a.genus_range.1,
        max_abs_degree: i64::try_from(a.max_abs_degree)
            .map_err(|_| CliError::usage("--max-abs-degree out of range"))?,
    };
    let report = grid_sweep(engine, a.name, &bounds);
    match a.format {
        Format::Text => write_report_text(&report, out)?,
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        )?,
        other => {
            return Err(CliError::usage(format!(
                "check does not support {other:?} output"
            )))
        }
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn write_report_text(report: &CheckReport, out: &mut dyn Write) -> std::io::Result<()> {
    let status = if report.passed() { "pass" } else { "fail" };
    match &report.label {
        Some(label) => writeln!(out, "check {}: {status} ({label})", report.check)?,
        None => writeln!(out, "check {}: {status}", report.check)?,
    }
    writeln!(out, "instances_run: {}", report.instances_run)?;
    writeln!(out, "skipped_unsupported: {}", report.skipped_unsupported)?;
    writeln!(out, "failures: {}", report.failures.len())?;
    for f in &report.failures {
        let i = &f.input;
        writeln!(
            out,
            "  g={} n={} d={} k={}: lhs={} rhs={}",
            i.genus, i.rank, i.degree, i.level, f.lhs, f.rhs
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TableRow {
    n: u64,
    values: Vec<String>,
}

#[derive(Debug, Serialize)]
struct TableJson<'a> {
    genus: u32,
    max_rank: u64,
    max_level: u64,
    rows: &'a [TableRow],
}

fn cmd_table(engine: &Engine, a: &TableArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.genus == 0 {
        return Err(CliError::usage("genus must be at least 1"));
    }
    let mut rows = Vec::new();
    for n in 1..=a.max_rank {
        let mut values = Vec::new();
        for k in 1..=a.max_level {
            let q = VerlindeQuery::new(a.genus, n, 0, k)?;
            values.push(engine.sl_dim(&q)?.value.to_string());
        }
        rows.push(TableRow { n, values });
    }
    let levels: Vec<String> = (1..=a.max_level).map(|k| k.to_string()).collect();
    match a.format {
        Format::Csv => {
            let header: Vec<String> = levels.iter().map(|k| format!("k={k}")).collect();
            writeln!(out, "n,{}", header.join(","))?;
            for r in &rows {
                writeln!(out, "{},{}", r.n, r.values.join(","))?;
            }
        }
        Format::Md => {
            writeln!(out, "| n \\ k | {} |", levels.join(" | "))?;
            writeln!(out, "|---|{}", "---|".repeat(levels.len()))?;
            for r in &rows {
                writeln!(out, "| {} | {} |", r.n, r.values.join(" | "))?;
            }
        }
        Format::Json => {
            let doc = TableJson {
                genus: a.genus,
                max_rank: a.max_rank,
                max_level: a.max_level,
                rows: &rows,
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string(&doc).expect("table serializes")
            )?;
        }
        Format::Text => {
            let width = rows
                .iter()
                .flat_map(|r| r.values.iter().map(String::len))
                .chain(levels.iter().map(String::len))
                .chain([a.max_rank.to_string().len(), 1])
                .max()
                .unwrap_or(1);
            let cells: Vec<String> = levels.iter().map(|k| format!("{k:>width$}")).collect();
            writeln!(out, "{:>width$} {}", "n", cells.join(" "))?;
            for r in &rows {
                let cells: Vec<String> = r.values.iter().map(|v| format!("{v:>width$}")).collect();
                writeln!(out, "{:>width$} {}", r.n, cells.join(" "))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_factor(subject: &FactorSubject, out: &mut dyn Write) -> Result<i32, CliError> {
    match *subject {
        FactorSubject::Pullback {
            n1,
            d1,
            n2,
            rk_f,
            deg_f,
        } => {
            let f = ThetaDescriptor::new(rk_f, FormalLineClass::symbol("detF", deg_f))?;
            let l1 = FormalLineClass::symbol("L1", d1);
            writeln!(out, "{}", pullback_split(n1, d1, n2, &f, &l1)?)?;
        }
        FactorSubject::Rescale {
            rk_f,
            rk_f0,
            deg_f,
            deg_f0,
        } => {
            let f = ThetaDescriptor::new(rk_f, FormalLineClass::symbol("detF", deg_f))?;
            let f0 = ThetaDescriptor::new(rk_f0, FormalLineClass::symbol("detF0", deg_f0))?;
            writeln!(out, "{}", theta_rescale(&f, &f0)?)?;
        }
        FactorSubject::Jacobian {
            genus,
            rank,
            degree,
        } => {
            writeln!(out, "{}", standard_jacobian_pullback(genus, rank, degree)?)?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_ranges() {
        assert_eq!(parse_genus_range("1..3"), Ok((1, 3)));
        assert_eq!(parse_genus_range("2"), Ok((2, 2)));
        assert!(parse_genus_range("1..x").is_err());
        assert!(parse_genus_range("..").is_err());
    }
}
