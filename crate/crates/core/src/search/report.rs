use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangles::PrimitiveTriangle;

use super::Coeffs;

pub const SCHEMA_VERSION: u32 = 1;

/// A triangle together with the coefficient vector that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub coeffs: Coeffs,
    #[serde(with = "crate::decimal")]
    pub a: Integer,
    #[serde(with = "crate::decimal")]
    pub b: Integer,
    #[serde(with = "crate::decimal")]
    pub c: Integer,
    #[serde(with = "crate::decimal")]
    pub u: Integer,
}

impl Witness {
    pub fn new(coeffs: &[i32], tri: &PrimitiveTriangle) -> Self {
        Witness {
            coeffs: coeffs.to_vec(),
            a: tri.a().clone(),
            b: tri.b().clone(),
            c: tri.c().clone(),
            u: tri.u().clone(),
        }
    }

    pub fn sides(&self) -> (&Integer, &Integer, &Integer) {
        (&self.a, &self.b, &self.c)
    }

    pub fn max_abs_coeff(&self) -> u32 {
        self.coeffs.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0)
    }
}

/// Two dissimilar primitive triangles with the same hypotenuse and area class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    #[serde(with = "crate::decimal")]
    pub hypotenuse: Integer,
    pub first: Witness,
    pub second: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapWitness {
    #[serde(with = "crate::decimal")]
    pub gap: Integer,
    /// The smaller hypotenuse.
    pub first: Witness,
    pub second: Witness,
}

/// Result of scanning one curve's coefficient box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    #[serde(with = "crate::decimal")]
    pub t: Integer,
    pub rank: usize,
    /// Ranks come from the generator source and are not verified here.
    pub rank_presumed: bool,
    pub box_k: u32,
    pub triangles_scanned: u64,
    pub torsion_skipped: u64,
    /// Identical triangles reached from distinct coefficient vectors; nonzero
    /// only when the generators are dependent.
    pub duplicate_triangles: u64,
    pub height_bound_violations: u64,
    pub exact_collisions: Vec<Collision>,
    pub min_gap: Option<GapWitness>,
    /// The smallest distinct hypotenuses, ascending.
    pub smallest: Vec<Witness>,
    /// `ln` of the smallest hypotenuse, 9 decimal places.
    pub smallest_ln_h: Option<String>,
    pub gap_below_t: bool,
}

impl ScanReport {
    /// The report of a scan that saw no triangles.
    pub fn empty(t: Integer, rank: usize, box_k: u32) -> Self {
        ScanReport {
            schema_version: SCHEMA_VERSION,
            t,
            rank,
            rank_presumed: true,
            box_k,
            triangles_scanned: 0,
            torsion_skipped: 0,
            duplicate_triangles: 0,
            height_bound_violations: 0,
            exact_collisions: Vec::new(),
            min_gap: None,
            smallest: Vec::new(),
            smallest_ln_h: None,
            gap_below_t: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles_scanned == 0
    }

    pub fn smallest_hypotenuse(&self) -> Option<&Witness> {
        self.smallest.first()
    }
}

/// The largest `|a_i|` over the two min-gap witnesses: the smallest box that
/// still contains the closest pair.
pub fn closest_pair_locality(report: &ScanReport) -> Result<u32> {
    let gap = report.min_gap.as_ref().ok_or(Error::NoPairs)?;
    Ok(gap.first.max_abs_coeff().max(gap.second.max_abs_coeff()))
}

pub(crate) fn format_ln(x: f64) -> String {
    format!("{x:.9}")
}
