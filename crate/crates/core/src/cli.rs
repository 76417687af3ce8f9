//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or validation error, 3 budget
//! exceeded, 4 invariant violation, 10 exact hypotenuse collision found.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::elliptic::CongruentCurve;
use crate::error::{Error, Result};
use crate::io::{self, BatchDocument, Format, Scale};
use crate::ntheory::{format_rational, parse_integer, SquarefreeInt};
use crate::regression;
use crate::search::{batch_scan, BoxPolicy, RecordFailure, ScanOptions, ScanReport};
use crate::triangles::point_to_primitive;
use crate::tunnell::{self, TunnellVerdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
pub const EXIT_COLLISION: i32 = 10;

#[derive(Debug, Parser)]
#[command(name = "congruent", version, about = "Congruent-number triangles: Tunnell verdicts, point search and hypotenuse collision scans")]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Hypotenuses above this many bits are kept as digests during scans.
    #[arg(long, global = true, value_name = "BITS")]
    digest_threshold: Option<u32>,

    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Table,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Table => Format::Table,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Linlog,
    Loglog,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tunnell verdict for n, or for every squarefree n in A..B.
    Classify {
        #[arg(value_name = "N|A..B")]
        target: String,
    },
    /// Rational points on E_t with naive height at most B.
    FindPoints {
        t: String,
        #[arg(long, value_name = "B")]
        height_bound: u64,
    },
    /// Collision scan over every record of a generator file.
    Scan {
        /// Generator records, one JSON object per line.
        #[arg(long, value_name = "FILE")]
        gens: PathBuf,
        /// Box size for every rank (before per-rank overrides).
        #[arg(long = "box", value_name = "K")]
        box_all: Option<u32>,
        /// Box size for rank-1 records.
        #[arg(long, value_name = "K")]
        box_rank1: Option<u32>,
        /// Box size for rank-2 records.
        #[arg(long, value_name = "K")]
        box_rank2: Option<u32>,
        /// Box size for rank-3 records.
        #[arg(long, value_name = "K")]
        box_rank3: Option<u32>,
        /// Box size for rank-4 records.
        #[arg(long, value_name = "K")]
        box_rank4: Option<u32>,
        /// Box size for rank-5 records.
        #[arg(long, value_name = "K")]
        box_rank5: Option<u32>,
        /// Box size for rank-6 records.
        #[arg(long, value_name = "K")]
        box_rank6: Option<u32>,
        /// Box size for rank-7 records.
        #[arg(long, value_name = "K")]
        box_rank7: Option<u32>,
    },
    /// Smallest-hypotenuse plot data from saved scan reports.
    PlotData {
        /// A scan output file, or a directory of them.
        #[arg(long, value_name = "DIR|FILE")]
        reports: PathBuf,
        /// linlog: (t, ln h); loglog: (ln t, ln h).
        #[arg(long, value_enum, default_value_t = ScaleArg::Linlog)]
        scale: ScaleArg,
    },
    /// Built-in regression checks on known examples.
    VerifyPaper,
}

/// Exit code for an error that ends a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        Error::Invariant(_) => EXIT_INVARIANT,
        Error::AtLine { source, .. } => exit_code(source),
        _ => EXIT_INVALID,
    }
}

struct Outcome {
    output: Vec<u8>,
    messages: Vec<String>,
    code: i32,
}

impl Outcome {
    fn ok(output: Vec<u8>) -> Self {
        Outcome {
            output,
            messages: Vec::new(),
            code: EXIT_OK,
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = pool.install(|| dispatch(&cli));
    let outcome = match outcome {
        Ok(outcome) => outcome,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    for message in &outcome.messages {
        let _ = writeln!(stderr, "{message}");
    }
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.output),
        None => stdout.write_all(&outcome.output),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_INVALID;
    }
    outcome.code
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let format = Format::from(cli.format);
    match &cli.command {
        Command::Classify { target } => classify(target, format),
        Command::FindPoints { t, height_bound } => find_points(t, *height_bound, format),
        Command::Scan {
            gens,
            box_all,
            box_rank1,
            box_rank2,
            box_rank3,
            box_rank4,
            box_rank5,
            box_rank6,
            box_rank7,
        } => {
            let mut policy = match box_all {
                Some(k) => BoxPolicy::uniform(*k),
                None => BoxPolicy::default(),
            };
            let per_rank = [box_rank1, box_rank2, box_rank3, box_rank4, box_rank5, box_rank6, box_rank7];
            for (i, k) in per_rank.into_iter().enumerate() {
                if let Some(k) = k {
                    policy.per_rank.insert(i + 1, *k);
                }
            }
            let mut opts = ScanOptions::default();
            if let Some(bits) = cli.digest_threshold {
                opts.digest_threshold_bits = bits;
            }
            scan(gens, &policy, &opts, format)
        }
        Command::PlotData { reports, scale } => {
            let scale = match scale {
                ScaleArg::Linlog => Scale::LinLog,
                ScaleArg::Loglog => Scale::LogLog,
            };
            let reports = io::load_reports(reports)?;
            let (output, warnings) = io::emit_plot_data(&reports, scale);
            Ok(Outcome {
                output,
                messages: warnings.into_iter().map(|w| format!("warning: {w}")).collect(),
                code: EXIT_OK,
            })
        }
        Command::VerifyPaper => verify(),
    }
}

fn parse_positive(text: &str) -> Result<rug::Integer> {
    let n = parse_integer(text.trim()).ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        reason: format!("not an integer: {text:?}"),
    })?;
    if n <= 0 {
        return Err(Error::NotPositive(n));
    }
    Ok(n)
}

fn classify(target: &str, format: Format) -> Result<Outcome> {
    let range = target.split_once("..");
    let verdicts: Vec<TunnellVerdict> = match range {
        Some((lo, hi)) => {
            let bound = |s: &str| {
                parse_positive(s)?.to_u64().ok_or_else(|| {
                    Error::BudgetExceeded(format!("range bound {s} exceeds the Tunnell counting limit"))
                })
            };
            tunnell::classify_range(bound(lo)?, bound(hi)?)?
        }
        None => vec![tunnell::classify_integer(&parse_positive(target)?)?],
    };
    let mut out = String::new();
    if format == Format::Table {
        out.push_str("n,congruent,count_32,count_8\n");
    }
    for v in &verdicts {
        match format {
            Format::Text => writeln!(out, "{v}"),
            Format::Table => writeln!(out, "{},{},{},{}", v.n, v.verdict.is_congruent(), v.counts.0, v.counts.1),
        }
        .expect("string write");
    }
    if let (Some(_), Format::Text) = (range, format) {
        let congruent = verdicts.iter().filter(|v| v.verdict.is_congruent()).count();
        writeln!(out, "{congruent} of {} squarefree n congruent (conditional on BSD)", verdicts.len())
            .expect("string write");
    }
    Ok(Outcome::ok(out.into_bytes()))
}

fn find_points(t: &str, bound: u64, format: Format) -> Result<Outcome> {
    let t = SquarefreeInt::new(parse_positive(t)?)?;
    let curve = CongruentCurve::new(t);
    let points = curve.find_small_points(bound)?;
    let mut out = String::new();
    if format == Format::Table {
        out.push_str("x,y,a,b,c\n");
    }
    for p in &points {
        let tri = point_to_primitive(&curve, p)?;
        let x = format_rational(p.x().expect("affine"));
        let y = format_rational(p.y().expect("affine"));
        match format {
            Format::Text => writeln!(out, "({x}, {y}) -> {tri}"),
            Format::Table => writeln!(out, "{x},{y},{},{},{}", tri.a(), tri.b(), tri.c()),
        }
        .expect("string write");
    }
    Ok(Outcome::ok(out.into_bytes()))
}

fn scan(gens: &std::path::Path, policy: &BoxPolicy, opts: &ScanOptions, format: Format) -> Result<Outcome> {
    let file = std::fs::File::open(gens)?;
    let (records, errors) = io::parse_generators_lenient(std::io::BufReader::new(file));
    if !errors.is_empty() {
        let mut messages: Vec<String> = errors.iter().map(|e| format!("error: {e}")).collect();
        messages.push(format!("{} invalid line(s) in {}", errors.len(), gens.display()));
        let code = errors.iter().map(exit_code).max().unwrap_or(EXIT_INVALID);
        return Ok(Outcome {
            output: Vec::new(),
            messages,
            code,
        });
    }
    let outcome = batch_scan(&records, policy, opts);
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for r in outcome.reports {
        match r {
            Ok(report) => reports.push(report),
            Err(failure) => failures.push(failure),
        }
    }
    let (messages, code) = batch_verdict(&reports, &failures);
    let doc = BatchDocument::new(reports, failures, outcome.summary);
    Ok(Outcome {
        output: io::emit_batch(&doc, format),
        messages,
        code,
    })
}

/// Diagnostics and exit code for a finished batch. Collisions outrank
/// invariant violations, which outrank per-record failures.
fn batch_verdict(reports: &[ScanReport], failures: &[RecordFailure]) -> (Vec<String>, i32) {
    let mut messages = Vec::new();
    let mut code = EXIT_OK;
    for f in failures {
        messages.push(format!("error: t = {}: {}", f.t, f.reason));
        code = code.max(if f.budget { EXIT_BUDGET } else { EXIT_INVALID });
    }
    for report in reports {
        if report.height_bound_violations > 0 {
            messages.push(format!(
                "error: t = {}: {} height-bound violations",
                report.t, report.height_bound_violations
            ));
            code = code.max(EXIT_INVARIANT);
        }
    }
    for report in reports {
        for c in &report.exact_collisions {
            messages.push(format!(
                "EXACT COLLISION FOUND: t = {}, hypotenuse {}: ({}, {}, {}) from {:?} and ({}, {}, {}) from {:?}",
                report.t, c.hypotenuse, c.first.a, c.first.b, c.first.c, c.first.coeffs, c.second.a, c.second.b,
                c.second.c, c.second.coeffs
            ));
            code = EXIT_COLLISION;
        }
    }
    (messages, code)
}

fn verify() -> Result<Outcome> {
    let checks = regression::run_all();
    let mut out = String::new();
    let count = |s: regression::Status| checks.iter().filter(|c| c.status == s).count();
    for check in &checks {
        writeln!(out, "{} {}: {}", check.status, check.name, check.detail).expect("string write");
    }
    let failed = count(regression::Status::Fail);
    writeln!(
        out,
        "{} checks, {} failed, {} differ from published figures",
        checks.len(),
        failed,
        count(regression::Status::Discrepancy)
    )
    .expect("string write");
    Ok(Outcome {
        output: out.into_bytes(),
        messages: Vec::new(),
        code: if failed == 0 { EXIT_OK } else { EXIT_INVARIANT },
    })
}
