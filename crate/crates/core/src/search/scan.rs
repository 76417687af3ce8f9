use std::cmp::Ordering;

use rayon::prelude::*;
use rug::Integer;
use sha2::{Digest, Sha256};

use crate::elliptic::{naive_height, CurvePoint};
use crate::error::{Error, Result};
use crate::ntheory::{ln_integer, SquarefreeInt};
use crate::triangles::{point_to_primitive, PrimitiveTriangle};

use super::report::{format_ln, Collision, GapWitness, ScanReport, Witness};
use super::walk::{reduced_triangle, units, MultiplesTable, UnitWalk};
use super::{BoxItem, BoxSpec, Coeffs, GeneratorRecord};

/// Bits kept from the top of a hypotenuse stored in compact form.
const TOP_BITS: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    /// Hypotenuses longer than this are stored as bit length, top bits and a
    /// SHA-256 digest, and rebuilt from their coefficients when needed.
    pub digest_threshold_bits: u32,
    /// How many of the smallest distinct hypotenuses to report.
    pub smallest_k: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            digest_threshold_bits: 4096,
            smallest_k: 2,
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    coeffs: Coeffs,
    bits: u32,
    /// The top `TOP_BITS` bits, or the whole value when it is shorter.
    top: u128,
    digest: [u8; 32],
    full: Option<PrimitiveTriangle>,
}

impl Entry {
    fn new(coeffs: Coeffs, tri: PrimitiveTriangle, threshold: u32) -> Self {
        let c = tri.c();
        let bits = c.significant_bits();
        let top = top_bits(c, bits);
        let digest = hyp_digest(c);
        let full = (bits <= threshold).then_some(tri);
        Entry {
            coeffs,
            bits,
            top,
            digest,
            full,
        }
    }

    fn key_eq(&self, other: &Entry) -> bool {
        self.bits == other.bits && self.top == other.top
    }

    fn key_cmp(&self, other: &Entry) -> Ordering {
        (self.bits, self.top, &self.coeffs).cmp(&(other.bits, other.top, &other.coeffs))
    }

    fn full(&self) -> &PrimitiveTriangle {
        self.full.as_ref().expect("entry materialized")
    }

    /// Inclusive bounds on the hypotenuse.
    fn bounds(&self) -> (Integer, Integer) {
        if let Some(tri) = &self.full {
            return (tri.c().clone(), tri.c().clone());
        }
        if self.bits <= TOP_BITS {
            return (Integer::from(self.top), Integer::from(self.top));
        }
        let shift = self.bits - TOP_BITS;
        let lo = Integer::from(self.top) << shift;
        let hi = (Integer::from(self.top + 1) << shift) - 1u32;
        (lo, hi)
    }
}

fn top_bits(c: &Integer, bits: u32) -> u128 {
    let top = if bits > TOP_BITS {
        Integer::from(c >> (bits - TOP_BITS))
    } else {
        c.clone()
    };
    top.to_u128().expect("at most 128 bits")
}

fn hyp_digest(c: &Integer) -> [u8; 32] {
    Sha256::digest(c.to_digits::<u8>(rug::integer::Order::Msf)).into()
}

/// Accumulates triangles from one curve and reduces them to a [`ScanReport`].
/// Scanners over disjoint parts of a box can be merged in any order.
#[derive(Debug, Clone)]
pub struct CollisionScanner {
    t: SquarefreeInt,
    rank: usize,
    box_k: u32,
    opts: ScanOptions,
    entries: Vec<Entry>,
    torsion_skipped: u64,
    height_bound_violations: u64,
}

impl CollisionScanner {
    pub fn new(t: SquarefreeInt, rank: usize, box_k: u32, opts: ScanOptions) -> Self {
        CollisionScanner {
            t,
            rank,
            box_k,
            opts,
            entries: Vec::new(),
            torsion_skipped: 0,
            height_bound_violations: 0,
        }
    }

    pub fn push(&mut self, coeffs: Coeffs, point: &CurvePoint, tri: PrimitiveTriangle) -> Result<()> {
        let height = naive_height(point)?;
        self.push_with_height(coeffs, &height, tri)
    }

    pub(crate) fn push_with_height(&mut self, coeffs: Coeffs, height: &Integer, tri: PrimitiveTriangle) -> Result<()> {
        if tri.t() != &self.t {
            return Err(Error::Invariant(format!(
                "triangle {tri} has area class {} in a scan of t = {}",
                tri.t(),
                self.t
            )));
        }
        if Integer::from(tri.c() * self.t.get()) * 2u32 < *height {
            self.height_bound_violations += 1;
        }
        self.entries.push(Entry::new(coeffs, tri, self.opts.digest_threshold_bits));
        Ok(())
    }

    pub fn push_torsion(&mut self) {
        self.torsion_skipped += 1;
    }

    pub fn merge(&mut self, other: CollisionScanner) {
        self.entries.extend(other.entries);
        self.torsion_skipped += other.torsion_skipped;
        self.height_bound_violations += other.height_bound_violations;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorts, groups equal hypotenuses and finds the closest distinct pair.
    /// `rebuild` recomputes the triangle of a coefficient vector for entries
    /// held in compact form.
    pub fn finish<F>(self, rebuild: F) -> Result<ScanReport>
    where
        F: Fn(&[i32]) -> Result<PrimitiveTriangle>,
    {
        let mut report = ScanReport::empty(self.t.get().clone(), self.rank, self.box_k);
        report.triangles_scanned = self.entries.len() as u64;
        report.torsion_skipped = self.torsion_skipped;
        report.height_bound_violations = self.height_bound_violations;
        let mut entries = self.entries;
        if entries.is_empty() {
            return Ok(report);
        }
        let materialize = |e: &mut Entry| -> Result<()> {
            if e.full.is_some() {
                return Ok(());
            }
            let tri = rebuild(&e.coeffs)?;
            let c = tri.c();
            if c.significant_bits() != e.bits || top_bits(c, e.bits) != e.top || hyp_digest(c) != e.digest {
                return Err(Error::Invariant(format!(
                    "recomputed triangle for {:?} does not match its digest",
                    e.coeffs
                )));
            }
            e.full = Some(tri);
            Ok(())
        };

        entries.sort_by(Entry::key_cmp);
        // Entries sharing bit length and top bits may be equal: rebuild them
        // and order the run exactly.
        let mut i = 0;
        while i < entries.len() {
            let mut j = i + 1;
            while j < entries.len() && entries[i].key_eq(&entries[j]) {
                j += 1;
            }
            if j - i >= 2 {
                for e in &mut entries[i..j] {
                    materialize(e)?;
                }
                entries[i..j].sort_by(|x, y| {
                    let (p, q) = (x.full(), y.full());
                    (p.c(), p.a(), &x.coeffs).cmp(&(q.c(), q.a(), &y.coeffs))
                });
            }
            i = j;
        }

        // Groups of equal hypotenuse; within a group, one representative per
        // distinct triangle (equal c and a determine the triangle).
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < entries.len() {
            let mut reps = vec![i];
            let mut j = i + 1;
            while j < entries.len() && entries[i].key_eq(&entries[j]) && entries[i].full().c() == entries[j].full().c() {
                let last = *reps.last().expect("nonempty");
                if entries[j].full().a() == entries[last].full().a() {
                    report.duplicate_triangles += 1;
                } else {
                    reps.push(j);
                }
                j += 1;
            }
            groups.push(reps);
            i = j;
        }

        for reps in &groups {
            for (x, &p) in reps.iter().enumerate() {
                for &q in &reps[x + 1..] {
                    report.exact_collisions.push(Collision {
                        hypotenuse: entries[p].full().c().clone(),
                        first: Witness::new(&entries[p].coeffs, entries[p].full()),
                        second: Witness::new(&entries[q].coeffs, entries[q].full()),
                    });
                }
            }
        }

        let reps: Vec<usize> = groups.iter().map(|g| g[0]).collect();
        let mut best: Option<(Integer, usize)> = None;
        let mut pending: Vec<(usize, Integer)> = Vec::new();
        for w in 0..reps.len().saturating_sub(1) {
            let (_, x_hi) = entries[reps[w]].bounds();
            let (y_lo, y_hi) = entries[reps[w + 1]].bounds();
            let (x_lo, _) = entries[reps[w]].bounds();
            let lower = Integer::from(&y_lo - &x_hi);
            if x_lo == x_hi && y_lo == y_hi {
                if best.as_ref().is_none_or(|(g, _)| lower < *g) {
                    best = Some((lower, w));
                }
            } else {
                pending.push((w, lower));
            }
        }
        for (w, lower) in pending {
            let beats = |g: &Integer, at: usize| lower < *g || (lower == *g && w < at);
            if best.as_ref().is_none_or(|(g, at)| beats(g, *at)) {
                materialize(&mut entries[reps[w]])?;
                materialize(&mut entries[reps[w + 1]])?;
                let gap = Integer::from(entries[reps[w + 1]].full().c() - entries[reps[w]].full().c());
                if best.as_ref().is_none_or(|(g, at)| gap < *g || (gap == *g && w < *at)) {
                    best = Some((gap, w));
                }
            }
        }
        if let Some((gap, w)) = best {
            materialize(&mut entries[reps[w]])?;
            materialize(&mut entries[reps[w + 1]])?;
            let (p, q) =(&entries[reps[w]], &entries[reps[w + 1]]);
            report.gap_below_t = gap < *self.t.get();
            report.min_gap = Some(GapWitness {
                gap,
                first: Witness::new(&p.coeffs, p.full()),
                second: Witness::new(&q.coeffs, q.full()),
            });
        }

        for &r in reps.iter().take(self.opts.smallest_k) {
            materialize(&mut entries[r])?;
            report.smallest.push(Witness::new(&entries[r].coeffs, entries[r].full()));
        }
        report.smallest_ln_h = report.smallest.first().map(|w| format_ln(ln_integer(&w.c)));
        Ok(report)
    }
}

/// Scans a stream of triangles from one curve. Rank and box size in the
/// report are taken from the coefficient vectors seen.
pub fn collision_scan<I>(t: &SquarefreeInt, items: I) -> Result<ScanReport>
where
    I: IntoIterator<Item = BoxItem>,
{
    let opts = ScanOptions {
        digest_threshold_bits: u32::MAX,
        ..ScanOptions::default()
    };
    let mut scanner = CollisionScanner::new(t.clone(), 0, 0, opts);
    for item in items {
        scanner.rank = scanner.rank.max(item.coeffs.len());
        let k = item.coeffs.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0);
        scanner.box_k = scanner.box_k.max(k);
        scanner.push(item.coeffs, &item.point, item.triangle)?;
    }
    scanner.finish(|coeffs| {
        Err(Error::Invariant(format!("no stored triangle for {coeffs:?}")))
    })
}

/// Enumerates the box of `rec` in parallel and scans it. The report does not
/// depend on the number of worker threads.
pub fn scan_record(rec: &GeneratorRecord, spec: BoxSpec, opts: &ScanOptions) -> Result<ScanReport> {
    let curve = rec.curve();
    let rank = rec.rank();
    let table = MultiplesTable::new(curve, rec.gens(), spec.k)?;
    let work: Vec<_> = units(rank, spec.k).collect();
    let partials: Vec<Result<CollisionScanner>> = work
        .par_iter()
        .map(|unit| {
            let mut scanner = CollisionScanner::new(rec.t().clone(), rank, spec.k, *opts);
            for step in UnitWalk::new(curve, &table, rank, spec.k, unit) {
                let (coeffs, point) = step?;
                let Some(height) = point.naive_height().filter(|_| !point.is_torsion()) else {
                    scanner.push_torsion();
                    continue;
                };
                let tri = reduced_triangle(curve, &point)?;
                scanner.push_with_height(coeffs, &height, tri)?;
            }
            Ok(scanner)
        })
        .collect();
    let mut scanner = CollisionScanner::new(rec.t().clone(), rank, spec.k, *opts);
    for partial in partials {
        scanner.merge(partial?);
    }
    scanner.finish(|coeffs| point_to_primitive(curve, &rec.point(coeffs)?))
}
