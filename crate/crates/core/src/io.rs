//! Generator-file ingestion, report serialization and plot data.
//!
//! Generator files hold one JSON record per line:
//! `{"t": 34, "rank": 2, "gens": [["-16", "120"], ["-2", "48"]]}`, with
//! coordinates written as `"num"` or `"num/den"`. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::elliptic::CurvePoint;
use crate::error::{Error, Result};
use crate::ntheory::{format_rational, ln_integer, parse_integer, parse_rational, SquarefreeInt};
use crate::search::format_ln;
use crate::search::{BatchSummary, GeneratorRecord, RecordFailure, ScanReport, SCHEMA_VERSION};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    t: serde_json::Number,
    rank: usize,
    gens: Vec<(String, String)>,
}

fn parse_line(line: &str, lineno: usize) -> Result<GeneratorRecord> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: lineno,
        column: e.column(),
        reason: e.to_string(),
    })?;
    let column_of = |needle: &str| line.find(needle).map_or(1, |i| i + 1);
    let t_text = raw.t.to_string();
    let t = parse_integer(&t_text).ok_or_else(|| Error::Parse {
        line: lineno,
        column: column_of(&t_text),
        reason: format!("t must be an integer, got {t_text}"),
    })?;
    let at_line = |e: Error| Error::AtLine {
        line: lineno,
        source: Box::new(e),
    };
    let t = SquarefreeInt::new(t).map_err(at_line)?;
    let mut gens = Vec::with_capacity(raw.gens.len());
    for (x, y) in &raw.gens {
        let coord = |s: &str| {
            parse_rational(s).ok_or_else(|| Error::Parse {
                line: lineno,
                column: column_of(&format!("\"{s}\"")),
                reason: format!("not a rational number: {s:?}"),
            })
        };
        gens.push(CurvePoint::affine(coord(x)?, coord(y)?));
    }
    GeneratorRecord::new(t, raw.rank, gens).map_err(at_line)
}

/// Parses every record, collecting all errors instead of stopping at the
/// first.
pub fn parse_generators_lenient<R: BufRead>(reader: R) -> (Vec<GeneratorRecord>, Vec<Error>) {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = match line {
            Ok(line) => line,
            Err(e) => {
                errors.push(Error::AtLine {
                    line: lineno,
                    source: Box::new(e.into()),
                });
                break;
            }
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_line(trimmed, lineno) {
            Ok(rec) => records.push(rec),
            Err(e) => errors.push(e),
        }
    }
    (records, errors)
}

/// Parses a generator stream, failing on the first bad line.
pub fn parse_generators<R: BufRead>(reader: R) -> Result<Vec<GeneratorRecord>> {
    let (records, mut errors) = parse_generators_lenient(reader);
    match errors.is_empty() {
        true => Ok(records),
        false => Err(errors.swap_remove(0)),
    }
}

pub fn parse_generator_file(path: &Path) -> Result<Vec<GeneratorRecord>> {
    let file = fs::File::open(path)?;
    parse_generators(std::io::BufReader::new(file))
}

/// One generator-file line for `rec`.
pub fn format_generator_record(rec: &GeneratorRecord) -> String {
    let gens: Vec<(String, String)> = rec
        .gens()
        .iter()
        .map(|g| {
            let x = g.x().map(format_rational).unwrap_or_default();
            let y = g.y().map(format_rational).unwrap_or_default();
            (x, y)
        })
        .collect();
    let gens = serde_json::to_string(&gens).expect("strings serialize");
    format!("{{\"t\": {}, \"rank\": {}, \"gens\": {gens}}}", rec.t(), rec.rank())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    /// Pretty-printed JSON.
    Text,
    /// CSV with columns `t,ln_t,ln_h,rank,min_gap,gap_below_t`.
    Table,
}

pub const TABLE_HEADER: &str = "t,ln_t,ln_h,rank,min_gap,gap_below_t";

fn table_row(report: &ScanReport) -> String {
    let ln_h = report.smallest_ln_h.clone().unwrap_or_default();
    let gap = report.min_gap.as_ref().map(|g| g.gap.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{}\n",
        report.t,
        format_ln(ln_integer(&report.t)),
        ln_h,
        report.rank,
        gap,
        report.gap_below_t
    )
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("reports serialize");
    out.push(b'\n');
    out
}

pub fn emit_scan_report(report: &ScanReport, format: Format) -> Vec<u8> {
    match format {
        Format::Text => to_json(report),
        Format::Table => format!("{TABLE_HEADER}\n{}", table_row(report)).into_bytes(),
    }
}

pub fn parse_scan_report(bytes: &[u8]) -> Result<ScanReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        reason: e.to_string(),
    })
}

/// Every report and failure from one batch scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchDocument {
    pub schema_version: u32,
    pub reports: Vec<ScanReport>,
    pub failures: Vec<RecordFailure>,
    pub summary: BatchSummary,
}

impl BatchDocument {
    pub fn new(reports: Vec<ScanReport>, failures: Vec<RecordFailure>, summary: BatchSummary) -> Self {
        BatchDocument {
            schema_version: SCHEMA_VERSION,
            reports,
            failures,
            summary,
        }
    }
}

pub fn emit_batch(doc: &BatchDocument, format: Format) -> Vec<u8> {
    match format {
        Format::Text => to_json(doc),
        Format::Table => {
            let mut out = format!("{TABLE_HEADER}\n");
            for report in &doc.reports {
                out.push_str(&table_row(report));
            }
            out.into_bytes()
        }
    }
}

/// Reads the reports in a single-report or batch JSON document.
pub fn parse_reports(bytes: &[u8]) -> Result<Vec<ScanReport>> {
    if let Ok(doc) = serde_json::from_slice::<BatchDocument>(bytes) {
        return Ok(doc.reports);
    }
    parse_scan_report(bytes).map(|r| vec![r])
}

/// Loads reports from a JSON file, or from every `*.json` file in a
/// directory (in file-name order).
pub fn load_reports(path: &Path) -> Result<Vec<ScanReport>> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .map(|entry| entry.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.extension().is_some_and(|e| e == "json"));
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut reports = Vec::new();
    for file in files {
        let bytes = fs::read(&file)?;
        let parsed = parse_reports(&bytes).map_err(|e| match e {
            Error::Parse { line, column, reason } => Error::Parse {
                line,
                column,
                reason: format!("{}: {reason}", file.display()),
            },
            other => other,
        })?;
        reports.extend(parsed);
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    /// `t` against `ln h`.
    LinLog,
    /// `ln t` against `ln h`.
    LogLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub t: Integer,
    pub ln_smallest_hypotenuse: f64,
    pub rank_label: usize,
}

/// Plot rows sorted by `t`, and one warning per report without a smallest
/// hypotenuse.
pub fn plot_rows(reports: &[ScanReport]) -> (Vec<PlotRow>, Vec<String>) {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for report in reports {
        match report.smallest_hypotenuse() {
            Some(w) => rows.push(PlotRow {
                t: report.t.clone(),
                ln_smallest_hypotenuse: ln_integer(&w.c),
                rank_label: report.rank,
            }),
            None => warnings.push(format!("t = {}: no smallest hypotenuse, skipped", report.t)),
        }
    }
    rows.sort_by(|x, y| (&x.t, x.rank_label).cmp(&(&y.t, y.rank_label)));
    (rows, warnings)
}

pub fn emit_plot_data(reports: &[ScanReport], scale: Scale) -> (Vec<u8>, Vec<String>) {
    let (rows, warnings) = plot_rows(reports);
    let mut out = String::new();
    match scale {
        Scale::LinLog => out.push_str("t,ln_h,rank\n"),
        Scale::LogLog => out.push_str("ln_t,ln_h,rank\n"),
    }
    for row in rows {
        let x = match scale {
            Scale::LinLog => row.t.to_string(),
            Scale::LogLog => format_ln(ln_integer(&row.t)),
        };
        writeln!(out, "{x},{},{}", format_ln(row.ln_smallest_hypotenuse), row.rank_label).expect("string write");
    }
    (out.into_bytes(), warnings)
}
