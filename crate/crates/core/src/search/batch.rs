use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::Error;

use super::report::{GapWitness, ScanReport};
use super::scan::{scan_record, ScanOptions};
use super::{BoxSpec, GeneratorRecord};

/// Box size per rank, with an optional size for ranks not listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxPolicy {
    pub per_rank: BTreeMap<usize, u32>,
    pub fallback: Option<u32>,
}

impl BoxPolicy {
    /// The same `k` for every rank.
    pub fn uniform(k: u32) -> Self {
        BoxPolicy {
            per_rank: BTreeMap::new(),
            fallback: Some(k),
        }
    }

    pub fn box_for(&self, rank: usize) -> Option<BoxSpec> {
        self.per_rank.get(&rank).copied().or(self.fallback).map(BoxSpec::new)
    }
}

impl Default for BoxPolicy {
    /// 300 for rank 1, 75 for rank 2, 4 otherwise.
    fn default() -> Self {
        BoxPolicy {
            per_rank: BTreeMap::from([(1, 300), (2, 75)]),
            fallback: Some(4),
        }
    }
}

/// A record that could not be scanned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordFailure {
    #[serde(with = "crate::decimal")]
    pub t: Integer,
    pub reason: String,
    /// The failure was a budget limit rather than bad input.
    pub budget: bool,
}

impl RecordFailure {
    fn new(rec: &GeneratorRecord, err: &Error) -> Self {
        RecordFailure {
            t: rec.t().get().clone(),
            reason: err.to_string(),
            budget: matches!(err, Error::BudgetExceeded(_)),
        }
    }
}

/// Totals over every successful report in a batch.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub records: usize,
    pub failures: usize,
    pub triangles_scanned: u64,
    pub exact_collisions: usize,
    pub height_bound_violations: u64,
    /// Curves whose closest pair differs by less than `t`, ascending.
    #[serde(with = "crate::decimal::vec")]
    pub gap_below_t: Vec<Integer>,
    /// The closest pairs over all curves, smallest gap first.
    pub closest_pairs: Vec<(String, GapWitness)>,
}

/// Number of entries kept in [`BatchSummary::closest_pairs`].
pub const CLOSEST_PAIRS_KEPT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchOutcome {
    pub reports: Vec<std::result::Result<ScanReport, RecordFailure>>,
    pub summary: BatchSummary,
}

/// Scans every record, in input order. A failing record yields a
/// [`RecordFailure`] in its slot and the rest of the batch continues.
pub fn batch_scan(records: &[GeneratorRecord], policy: &BoxPolicy, opts: &ScanOptions) -> BatchOutcome {
    let reports: Vec<_> = records
        .par_iter()
        .map(|rec| {
            let spec = policy.box_for(rec.rank()).ok_or_else(|| {
                Error::InvalidRecord {
                    t: rec.t().to_string(),
                    reason: format!("no box size for rank {}", rec.rank()),
                }
            });
            spec.and_then(|spec| scan_record(rec, spec, opts))
                .map_err(|e| RecordFailure::new(rec, &e))
        })
        .collect();
    let summary = summarize(&reports);
    BatchOutcome { reports, summary }
}

fn summarize(reports: &[std::result::Result<ScanReport, RecordFailure>]) -> BatchSummary {
    let mut summary = BatchSummary {
        records: reports.len(),
        ..BatchSummary::default()
    };
    let mut pairs: Vec<(Integer, Integer, GapWitness)> = Vec::new();
    for report in reports {
        let Ok(report) = report else {
            summary.failures += 1;
            continue;
        };
        summary.triangles_scanned += report.triangles_scanned;
        summary.exact_collisions += report.exact_collisions.len();
        summary.height_bound_violations += report.height_bound_violations;
        if report.gap_below_t {
            summary.gap_below_t.push(report.t.clone());
        }
        if let Some(gap) = &report.min_gap {
            pairs.push((gap.gap.clone(), report.t.clone(), gap.clone()));
        }
    }
    summary.gap_below_t.sort();
    pairs.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    summary.closest_pairs = pairs
        .into_iter()
        .take(CLOSEST_PAIRS_KEPT)
        .map(|(_, t, w)| (t.to_string(), w))
        .collect();
    summary
}
