//! Coefficient-box enumeration over generator sets and the hypotenuse
//! collision scan.

mod batch;
mod report;
mod scan;
mod walk;

use std::fmt;

use rug::Integer;

use crate::elliptic::{naive_height, CongruentCurve, CurvePoint};
use crate::error::{Error, Result};
use crate::ntheory::SquarefreeInt;
use crate::triangles::PrimitiveTriangle;

pub use batch::{batch_scan, BatchOutcome, BatchSummary, BoxPolicy, RecordFailure};
pub use report::{closest_pair_locality, Collision, GapWitness, ScanReport, Witness, SCHEMA_VERSION};
pub use scan::{collision_scan, scan_record, CollisionScanner, ScanOptions};
pub use walk::{enumerate_box, BoxEnumeration, BoxItem};

pub(crate) use report::format_ln;

/// Generator coefficients `(a_1, ..., a_r)`.
pub type Coeffs = Vec<i32>;

/// Generators of (a subgroup of) the free part of `E_t(Q)`, as ingested.
/// The rank is whatever the source claimed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorRecord {
    curve: CongruentCurve,
    claimed_rank: usize,
    gens: Vec<CurvePoint>,
}

impl GeneratorRecord {
    pub fn new(t: SquarefreeInt, claimed_rank: usize, gens: Vec<CurvePoint>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidRecord {
            t: t.to_string(),
            reason,
        };
        if claimed_rank == 0 {
            return Err(invalid("rank must be positive".into()));
        }
        if gens.len() != claimed_rank {
            return Err(invalid(format!(
                "rank {claimed_rank} but {} generators",
                gens.len()
            )));
        }
        let curve = CongruentCurve::new(t.clone());
        for g in &gens {
            if g.is_torsion() {
                return Err(invalid(format!("generator {g} is a torsion point")));
            }
            if !curve.contains(g) {
                return Err(Error::NotOnCurve {
                    point: g.to_string(),
                    t: t.get().clone(),
                });
            }
        }
        Ok(GeneratorRecord {
            curve,
            claimed_rank,
            gens,
        })
    }

    pub fn t(&self) -> &SquarefreeInt {
        self.curve.t()
    }

    pub fn curve(&self) -> &CongruentCurve {
        &self.curve
    }

    pub fn rank(&self) -> usize {
        self.claimed_rank
    }

    pub fn gens(&self) -> &[CurvePoint] {
        &self.gens
    }

    /// `sum coeffs[i] * gens[i]`.
    pub fn point(&self, coeffs: &[i32]) -> Result<CurvePoint> {
        let wide: Vec<i64> = coeffs.iter().map(|&a| i64::from(a)).collect();
        self.curve.linear_combination(&self.gens, &wide)
    }
}

/// The box `|a_i| <= k`, taken up to global sign and without the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoxSpec {
    pub k: u32,
}

impl BoxSpec {
    pub fn new(k: u32) -> Self {
        BoxSpec { k }
    }

    /// `((2k + 1)^r - 1) / 2`, or `None` on overflow.
    pub fn vector_count(&self, rank: usize) -> Option<u128> {
        let side = 2 * u128::from(self.k) + 1;
        let total = side.checked_pow(u32::try_from(rank).ok()?)?;
        Some((total - 1) / 2)
    }

    /// Coefficient vectors whose first nonzero entry is positive, in
    /// lexicographic order of (leading position, leading value, rest).
    pub fn vectors(&self, rank: usize) -> impl Iterator<Item = Coeffs> + '_ {
        walk::units(rank, self.k).flat_map(move |unit| walk::Odometer::new(rank, self.k, &unit))
    }
}

impl fmt::Display for BoxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|a_i| <= {}", self.k)
    }
}

/// `c >= H(P) / 2t`, compared exactly as `2 t c >= H(P)`.
pub fn height_bound_check(point: &CurvePoint, tri: &PrimitiveTriangle, t: &SquarefreeInt) -> bool {
    match naive_height(point) {
        Ok(h) => Integer::from(tri.c() * t.get()) * 2u32 >= h,
        Err(_) => false,
    }
}
