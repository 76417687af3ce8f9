use rayon::prelude::*;

use crate::elliptic::{CongruentCurve, CurvePoint};
use crate::error::{Error, Result};
use crate::jacobian::{Jacobian, Reduced};
use crate::triangles::{primitive_from_parts, PrimitiveTriangle};

use super::{BoxSpec, Coeffs, GeneratorRecord};

/// The triangle of a non-torsion point in lowest terms.
pub(crate) fn reduced_triangle(curve: &CongruentCurve, p: &Reduced) -> Result<PrimitiveTriangle> {
    match p {
        Reduced::Point { p, q, r } if !r.is_zero() => primitive_from_parts(curve.t(), p, q, r),
        _ => Err(Error::TorsionPoint(p.to_affine().to_string())),
    }
}

/// A slice of the box: vectors whose first nonzero coordinate sits at
/// `lead`, with the coordinates `lead..lead + fixed.len()` pinned to `fixed`
/// (`fixed[0] > 0`). Units partition the box and are listed in enumeration
/// order, so concatenating per-unit results is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Unit {
    pub lead: usize,
    pub fixed: Vec<i32>,
}

/// Coordinates pinned per unit, lead included.
const PINNED: usize = 3;

pub(crate) fn units(rank: usize, k: u32) -> impl Iterator<Item = Unit> {
    let k = k as i32;
    let side = (2 * k + 1) as usize;
    (0..rank).flat_map(move |lead| {
        let pinned = PINNED.min(rank - lead);
        let tails = side.pow(pinned as u32 - 1);
        (1..=k).flat_map(move |value| {
            (0..tails).map(move |mut idx| {
                let mut fixed = vec![0; pinned];
                fixed[0] = value;
                for slot in fixed[1..].iter_mut().rev() {
                    *slot = (idx % side) as i32 - k;
                    idx /= side;
                }
                Unit { lead, fixed }
            })
        })
    })
}

/// Counts through the free coordinates after the lead, rightmost fastest.
#[derive(Debug, Clone)]
pub(crate) struct Odometer {
    coeffs: Coeffs,
    free_from: usize,
    k: i32,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(rank: usize, k: u32, unit: &Unit) -> Self {
        let k = k as i32;
        let mut coeffs = vec![0; rank];
        let free_from = unit.lead + unit.fixed.len();
        coeffs[unit.lead..free_from].copy_from_slice(&unit.fixed);
        for a in &mut coeffs[free_from..] {
            *a = -k;
        }
        Odometer {
            coeffs,
            free_from,
            k,
            started: false,
            done: false,
        }
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    /// Moves to the next vector and returns the first index that changed.
    pub fn step(&mut self) -> Option<usize> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(0);
        }
        let rank = self.coeffs.len();
        for pos in (self.free_from..rank).rev() {
            if self.coeffs[pos] < self.k {
                self.coeffs[pos] += 1;
                for a in &mut self.coeffs[pos + 1..] {
                    *a = -self.k;
                }
                return Some(pos);
            }
        }
        self.done = true;
        None
    }
}

impl Iterator for Odometer {
    type Item = Coeffs;

    fn next(&mut self) -> Option<Coeffs> {
        self.step().map(|_| self.coeffs.clone())
    }
}

/// `table[i][a + k] = a * g_i` for `|a| <= k`, in lowest terms.
#[derive(Debug, Clone)]
pub(crate) struct MultiplesTable {
    k: i32,
    rows: Vec<Vec<Jacobian>>,
}

impl MultiplesTable {
    pub fn new(curve: &CongruentCurve, gens: &[CurvePoint], k: u32) -> Result<Self> {
        let k = k as i32;
        let rows = gens
            .par_iter()
            .map(|g| {
                let g = Reduced::from_affine(g)?.into_jacobian();
                let mut positive = Vec::with_capacity(k as usize + 1);
                positive.push(Reduced::Infinity);
                for a in 1..=k as usize {
                    let next = curve.jacobian_add(&positive[a - 1].to_jacobian(), &g).reduce()?;
                    positive.push(next);
                }
                let mut row: Vec<Jacobian> = positive[1..].iter().rev().map(|p| p.negate().into_jacobian()).collect();
                row.extend(positive.into_iter().map(Reduced::into_jacobian));
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(MultiplesTable { k, rows })
    }

    pub fn get(&self, gen: usize, a: i32) -> &Jacobian {
        &self.rows[gen][(a + self.k) as usize]
    }
}

/// Recomputes the partial sums from index `from` on and returns the full sum.
/// `prefix[j] = sum_{i < j} a_i g_i`, kept in lowest terms.
fn advance(
    curve: &CongruentCurve,
    table: &MultiplesTable,
    coeffs: &[i32],
    from: usize,
    prefix: &mut [Jacobian],
) -> Result<Reduced> {
    let last = coeffs.len() - 1;
    for j in from..last {
        prefix[j + 1] = curve.jacobian_add(&prefix[j], table.get(j, coeffs[j])).reduce()?.into_jacobian();
    }
    curve.jacobian_add(&prefix[last], table.get(last, coeffs[last])).reduce()
}

/// Walks one unit, producing `(coeffs, point)` with one group addition per
/// step by caching partial sums.
pub(crate) struct UnitWalk<'a> {
    curve: &'a CongruentCurve,
    table: &'a MultiplesTable,
    odometer: Odometer,
    prefix: Vec<Jacobian>,
}

impl<'a> UnitWalk<'a> {
    pub fn new(curve: &'a CongruentCurve, table: &'a MultiplesTable, rank: usize, k: u32, unit: &Unit) -> Self {
        UnitWalk {
            curve,
            table,
            odometer: Odometer::new(rank, k, unit),
            prefix: vec![Jacobian::Infinity; rank],
        }
    }
}

impl Iterator for UnitWalk<'_> {
    type Item = Result<(Coeffs, Reduced)>;

    fn next(&mut self) -> Option<Self::Item> {
        let from = self.odometer.step()?;
        let coeffs = self.odometer.coeffs();
        Some(advance(self.curve, self.table, coeffs, from, &mut self.prefix).map(|p| (coeffs.to_vec(), p)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxItem {
    pub coeffs: Coeffs,
    pub point: CurvePoint,
    pub triangle: PrimitiveTriangle,
}

/// Sequential enumeration of a box; torsion hits are skipped and counted.
pub struct BoxEnumeration<'a> {
    record: &'a GeneratorRecord,
    table: MultiplesTable,
    units: Vec<Unit>,
    next_unit: usize,
    current: Option<Odometer>,
    prefix: Vec<Jacobian>,
    k: u32,
    torsion_skipped: u64,
}

impl BoxEnumeration<'_> {
    pub fn torsion_skipped(&self) -> u64 {
        self.torsion_skipped
    }
}

pub fn enumerate_box<'a>(record: &'a GeneratorRecord, spec: BoxSpec) -> Result<BoxEnumeration<'a>> {
    Ok(BoxEnumeration {
        record,
        table: MultiplesTable::new(record.curve(), record.gens(), spec.k)?,
        units: units(record.rank(), spec.k).collect(),
        next_unit: 0,
        current: None,
        prefix: vec![Jacobian::Infinity; record.rank()],
        k: spec.k,
        torsion_skipped: 0,
    })
}

impl Iterator for BoxEnumeration<'_> {
    type Item = Result<BoxItem>;

    fn next(&mut self) -> Option<Self::Item> {
        let curve = self.record.curve();
        loop {
            if self.current.is_none() {
                let unit = self.units.get(self.next_unit)?;
                self.next_unit += 1;
                self.current = Some(Odometer::new(self.record.rank(), self.k, unit));
            }
            let odo = self.current.as_mut().expect("set above");
            let Some(from) = odo.step() else {
                self.current = None;
                continue;
            };
            let coeffs = odo.coeffs();
            let reduced = match advance(curve, &self.table, coeffs, from, &mut self.prefix) {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            if reduced.is_torsion() {
                self.torsion_skipped += 1;
                continue;
            }
            let coeffs = coeffs.to_vec();
            return Some(reduced_triangle(curve, &reduced).map(|triangle| BoxItem {
                coeffs,
                point: reduced.to_affine(),
                triangle,
            }));
        }
    }
}
