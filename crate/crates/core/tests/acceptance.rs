//! Acceptance criteria, one PASS/FAIL line each.
//!
//! A criterion whose stated figure disagrees with an independent
//! recomputation is reported as FAIL and marked as a known discrepancy; the
//! run still requires the computed value to equal the recomputed one. Any
//! other failure makes the process exit nonzero.
//!
//! Set `CONGRUENT_HIGH_RANK_FILE` to a generator file converted from the
//! high-rank dataset to also run the t = 6611719866 check on real generators.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use congruent::cli;
use congruent::elliptic::{rat, CongruentCurve, CurvePoint};
use congruent::io::{self, Format};
use congruent::ntheory::SquarefreeInt;
use congruent::regression::{extra_records, fixture, fixture_records, E6_400G_BITS, E6_4G_BITS};
use congruent::search::{
    closest_pair_locality, enumerate_box, scan_record, BoxSpec, GeneratorRecord, ScanOptions, ScanReport,
};
use congruent::triangles::{point_to_primitive, point_to_triangle, torsion_orbit_triangles, triangle_to_point};
use congruent::tunnell::{classify, Verdict};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rug::Integer;

enum Outcome {
    Pass(String),
    Fail(String),
    /// Failed against the stated figure, but matches an independent recomputation.
    KnownDiscrepancy(String),
}

type Check = Result<Outcome, String>;
type Criterion = fn() -> Check;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed <= budget, || format!("took {elapsed:?}, budget {budget:?}"))
}

fn sf(t: u64) -> SquarefreeInt {
    SquarefreeInt::try_from(t).unwrap()
}

fn e(err: congruent::Error) -> String {
    err.to_string()
}

fn c1_e6_regression() -> Check {
    let start = Instant::now();
    let e6 = CongruentCurve::new(sf(6));
    let g = CurvePoint::affine(-3, 9);
    let t1 = point_to_primitive(&e6, &g).map_err(e)?;
    let g2 = e6.double(&g);
    let t2 = point_to_primitive(&e6, &g2).map_err(e)?;
    let t4 = point_to_primitive(&e6, &e6.scalar_mul(4, &g)).map_err(e)?;
    within(start.elapsed(), Duration::from_secs(1))?;
    ensure(t1.to_string() == "(3, 4, 5)", || format!("triangle(g) = {t1}"))?;
    ensure(g2 == CurvePoint::affine(rat(25, 4), rat(-35, 8)), || format!("2g = {g2}"))?;
    ensure(t2.to_string() == "(49, 1200, 1201)", || format!("triangle(2g) = {t2}"))?;
    ensure(*t4.c() == 2094350404801u64, || format!("hypotenuse(4g) = {}", t4.c()))?;
    let bits = [t1.c(), t2.c(), t4.c()].map(|c| c.significant_bits());
    let detail = format!("(3,4,5), 2g=(25/4,-35/8), (49,1200,1201), h(4g)=2094350404801; bit lengths {bits:?}");
    if bits == [3, 11, 29] {
        return Ok(Outcome::Pass(detail));
    }
    ensure(bits == [3, 11, E6_4G_BITS], || format!("bit lengths {bits:?}"))?;
    Ok(Outcome::KnownDiscrepancy(format!(
        "{detail}; stated 29 bits, but 2094350404801 = 2^40 * 1.905 has 41 bits"
    )))
}

fn c2_large_multiple() -> Check {
    let start = Instant::now();
    let e6 = CongruentCurve::new(sf(6));
    let p = e6.scalar_mul(400, &CurvePoint::affine(-3, 9));
    let bits = point_to_primitive(&e6, &p).map_err(e)?.c().significant_bits();
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(300))?;
    let detail = format!("h(400g) has {bits} bits ({elapsed:.2?})");
    if bits == 410426 {
        return Ok(Outcome::Pass(detail));
    }
    ensure(bits == E6_400G_BITS, || detail.clone())?;
    Ok(Outcome::KnownDiscrepancy(format!(
        "{detail}; stated 410426, independent recomputation gives {E6_400G_BITS}"
    )))
}

fn pair_sides(report: &ScanReport) -> Vec<String> {
    let gap = report.min_gap.as_ref().expect("pair");
    [&gap.first, &gap.second]
        .iter()
        .map(|w| format!("({}, {}, {})", w.a, w.b, w.c))
        .collect()
}

fn c3_e34() -> Check {
    let start = Instant::now();
    let rec = fixture(34).map_err(e)?;
    let curve = rec.curve();
    let t1 = point_to_primitive(curve, &rec.gens()[0]).map_err(e)?;
    let t2 = point_to_primitive(curve, &rec.gens()[1]).map_err(e)?;
    ensure(t1.to_string() == "(225, 272, 353)", || format!("g1 -> {t1}"))?;
    ensure(t2.to_string() == "(17, 144, 145)", || format!("g2 -> {t2}"))?;
    let report = scan_record(&rec, BoxSpec::new(5), &ScanOptions::default()).map_err(e)?;
    within(start.elapsed(), Duration::from_secs(10))?;
    let sides = pair_sides(&report);
    ensure(sides == ["(17, 144, 145)", "(225, 272, 353)"], || format!("closest pair {sides:?}"))?;
    let k = closest_pair_locality(&report).map_err(e)?;
    ensure(k == 1, || format!("locality {k}"))?;
    Ok(Outcome::Pass(format!("K=5, {} triangles: closest pair {sides:?}, locality 1", report.triangles_scanned)))
}

fn c4_e210() -> Check {
    let start = Instant::now();
    let curve = CongruentCurve::new(sf(210));
    let points = curve.find_small_points(100).map_err(e)?;
    let g1 = CurvePoint::affine(-35, 1225);
    let g2 = CurvePoint::affine(-84, 1764);
    ensure(points.contains(&g1) && points.contains(&g2), || "generators not found by the search".into())?;
    let rec = GeneratorRecord::new(sf(210), 2, vec![g1, g2]).map_err(e)?;
    let report = scan_record(&rec, BoxSpec::new(2), &ScanOptions::default()).map_err(e)?;
    within(start.elapsed(), Duration::from_secs(60))?;
    let gap = &report.min_gap.as_ref().ok_or("no pair")?.gap;
    ensure(*gap == 8, || format!("min gap {gap}"))?;
    let sides = pair_sides(&report);
    ensure(sides == ["(20, 21, 29)", "(12, 35, 37)"], || format!("witnesses {sides:?}"))?;
    let k = closest_pair_locality(&report).map_err(e)?;
    ensure(k <= 2, || format!("locality {k}"))?;
    Ok(Outcome::Pass(format!("min gap 8, witnesses {sides:?}, locality {k}")))
}

fn c5_tunnell() -> Check {
    let cases = [
        (113, Verdict::NonCongruent),
        (157, Verdict::CongruentConditionalBsd),
        (6, Verdict::CongruentConditionalBsd),
        (1, Verdict::NonCongruent),
    ];
    let mut seen = Vec::new();
    for (n, want) in cases {
        let start = Instant::now();
        let v = classify(&sf(n)).map_err(e)?;
        within(start.elapsed(), Duration::from_secs(1))?;
        ensure(v.verdict == want, || v.to_string())?;
        seen.push(v.to_string());
    }
    Ok(Outcome::Pass(seen.join("; ")))
}

fn fixture_box(rec: &GeneratorRecord) -> u32 {
    if rec.rank() == 1 {
        10
    } else {
        5
    }
}

fn c6_no_collisions() -> Check {
    let mut total = 0;
    for rec in fixture_records().map_err(e)? {
        let k = fixture_box(&rec);
        for threshold in [u32::MAX, 256] {
            let opts = ScanOptions {
                digest_threshold_bits: threshold,
                ..ScanOptions::default()
            };
            let report = scan_record(&rec, BoxSpec::new(k), &opts).map_err(e)?;
            ensure(report.exact_collisions.is_empty(), || format!("collision at t = {}", rec.t()))?;
            ensure(report.height_bound_violations == 0, || format!("height bound at t = {}", rec.t()))?;
            ensure(report.torsion_skipped == 0 && report.duplicate_triangles == 0, || {
                format!("dependent generators at t = {}", rec.t())
            })?;
            if threshold == u32::MAX {
                total += report.triangles_scanned;
            }
        }
    }
    Ok(Outcome::Pass(format!(
        "{total} triangles over 8 curves (K=10 rank 1, K=5 rank 2, full and digest storage): no collisions, no height-bound violations"
    )))
}

fn c7_box_counts() -> Check {
    let f = |r: usize, k: u32| BoxSpec::new(k).vector_count(r).unwrap();
    ensure(f(2, 75) == 11400, || format!("(2, 75) -> {}", f(2, 75)))?;
    ensure(f(7, 4) == 2391484, || format!("(7, 4) -> {}", f(7, 4)))?;
    ensure(f(6, 4) == 265720, || format!("(6, 4) -> {}", f(6, 4)))?;
    for (r, k) in [(1, 300), (2, 75), (6, 1), (7, 1), (3, 6)] {
        let n = BoxSpec::new(k).vectors(r).count() as u128;
        ensure(n == f(r, k), || format!("enumerated {n} vectors for (r={r}, K={k})"))?;
    }
    let rec = fixture(34).map_err(e)?;
    let walked = enumerate_box(&rec, BoxSpec::new(3)).expect("table").count() as u128;
    ensure(walked == f(2, 3), || format!("E_34 K=3 walk yields {walked}"))?;
    let report = scan_record(&rec, BoxSpec::new(75), &ScanOptions::default()).map_err(e)?;
    ensure(report.triangles_scanned == 11400, || format!("E_34 K=75 scan saw {}", report.triangles_scanned))?;
    ensure(report.exact_collisions.is_empty() && report.height_bound_violations == 0, || {
        "E_34 K=75 scan not clean".into()
    })?;
    Ok(Outcome::Pass(
        "11400 (r=2,K=75; scanned on E_34, no collisions), 2391484 (r=7,K=4); rank-6 K=4 is 265720, so the stated 267520 is flagged as inconsistent".into(),
    ))
}

/// Every vector of the box, generated independently of the library walk.
fn naive_vectors(rank: usize, k: i32) -> Vec<Vec<i32>> {
    let side = (2 * k + 1) as usize;
    let mut out = Vec::new();
    for idx in 0..side.pow(rank as u32) {
        let mut v = vec![0; rank];
        let mut rest = idx;
        for slot in v.iter_mut().rev() {
            *slot = (rest % side) as i32 - k;
            rest /= side;
        }
        if v.iter().find(|&&a| a != 0).is_some_and(|&a| a > 0) {
            out.push(v);
        }
    }
    out
}

/// All-pairs reference for a scan, using the slow rational triangle map.
fn oracle_agrees(rec: &GeneratorRecord, k: u32, report: &ScanReport) -> Result<(), String> {
    let curve = rec.curve();
    let t = rec.t().get();
    let mut items = Vec::new();
    let mut torsion = 0;
    let mut violations = 0;
    for v in naive_vectors(rec.rank(), k as i32) {
        let p = rec.point(&v).map_err(e)?;
        if p.is_torsion() {
            torsion += 1;
            continue;
        }
        let tri = point_to_triangle(curve, &p).map_err(e)?.to_primitive().map_err(e)?;
        let h = congruent::elliptic::naive_height(&p).map_err(e)?;
        if Integer::from(tri.c() * t) * 2u32 < h {
            violations += 1;
        }
        items.push((v, tri));
    }
    let ctx = format!("t={} K={k}", rec.t());
    ensure(report.triangles_scanned == items.len() as u64, || format!("{ctx}: count"))?;
    ensure(report.torsion_skipped == torsion, || format!("{ctx}: torsion"))?;
    ensure(report.height_bound_violations == violations, || format!("{ctx}: violations"))?;
    let mut collisions = BTreeSet::new();
    let mut duplicates = BTreeSet::new();
    let mut best: Option<Integer> = None;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let (x, y) = (&items[i].1, &items[j].1);
            if x.c() == y.c() {
                if x.similar(y) {
                    duplicates.insert(j.max(i));
                } else {
                    collisions.insert((x.c().clone(), x.clone().min(y.clone()), x.clone().max(y.clone())));
                }
            } else {
                let gap = Integer::from(x.c() - y.c()).abs();
                if best.as_ref().is_none_or(|b| gap < *b) {
                    best = Some(gap);
                }
            }
        }
    }
    let reported: BTreeSet<_> = report
        .exact_collisions
        .iter()
        .map(|c| {
            let (a, b) = (c.first.c.clone(), c.second.c.clone());
            (c.hypotenuse.clone(), a, b)
        })
        .collect();
    ensure(reported.len() == collisions.len(), || format!("{ctx}: collisions"))?;
    ensure(report.duplicate_triangles == duplicates.len() as u64, || format!("{ctx}: duplicates"))?;
    let tri_of = |coeffs: &[i32]| items.iter().find(|(v, _)| v == coeffs).map(|(_, t)| t.clone());
    match (&best, &report.min_gap) {
        (None, None) => {}
        (Some(gap), Some(w)) => {
            ensure(w.gap == *gap, || format!("{ctx}: gap {} vs {gap}", w.gap))?;
            let p = tri_of(&w.first.coeffs).ok_or(format!("{ctx}: witness coeffs"))?;
            let q = tri_of(&w.second.coeffs).ok_or(format!("{ctx}: witness coeffs"))?;
            ensure(*p.c() == w.first.c && *q.c() == w.second.c, || format!("{ctx}: witness triangles"))?;
            ensure(Integer::from(q.c() - p.c()) == *gap, || format!("{ctx}: witness gap"))?;
        }
        _ => return Err(format!("{ctx}: gap presence")),
    }
    let hyps: BTreeSet<Integer> = items.iter().map(|(_, t)| t.c().clone()).collect();
    let smallest: Vec<Integer> = hyps.into_iter().take(2).collect();
    let got: Vec<Integer> = report.smallest.iter().map(|w| w.c.clone()).collect();
    ensure(got == smallest, || format!("{ctx}: smallest"))?;
    for w in &report.smallest {
        let tri = tri_of(&w.coeffs).ok_or(format!("{ctx}: smallest coeffs"))?;
        ensure(*tri.c() == w.c && *tri.a() == w.a && *tri.u() == w.u, || format!("{ctx}: smallest witness"))?;
    }
    Ok(())
}

fn c8_oracle() -> Check {
    let mut records = fixture_records().map_err(e)?;
    records.extend(extra_records().map_err(e)?);
    let mut scans = 0;
    for rec in &records {
        let max_k = match (rec.rank(), rec.t().get().significant_bits() > 16) {
            (_, true) => 2,
            (1, _) => 10,
            _ => 5,
        };
        for k in 1..=max_k {
            if BoxSpec::new(k).vector_count(rec.rank()).unwrap() > 5000 {
                continue;
            }
            let report = scan_record(rec, BoxSpec::new(k), &ScanOptions::default()).map_err(e)?;
            oracle_agrees(rec, k, &report)?;
            scans += 1;
        }
    }
    let small: Vec<GeneratorRecord> = records.iter().filter(|r| r.rank() <= 2).cloned().collect();
    let n = small.len();
    let mut runner = TestRunner::new(Config {
        cases: 48,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (0..n, 1u32..=4, prop_oneof![Just(0u32), 1u32..200, Just(4096u32)]);
    runner
        .run(&strategy, |(i, k, threshold)| {
            let rec = &small[i];
            if rec.t().get().significant_bits() > 16 && k > 2 {
                return Ok(());
            }
            let opts = ScanOptions {
                digest_threshold_bits: threshold,
                smallest_k: 2,
            };
            let report = scan_record(rec, BoxSpec::new(k), &opts).map_err(|err| TestCaseError::fail(err.to_string()))?;
            oracle_agrees(rec, k, &report).map_err(TestCaseError::fail)?;
            Ok(())
        })
        .map_err(|err| err.to_string())?;
    Ok(Outcome::Pass(format!(
        "{scans} fixture scans plus 48 random (record, K <= 4, digest threshold) cases agree with all-pairs reference"
    )))
}

fn c9_substitutes() -> Check {
    let mut notes = Vec::new();

    // Hand-built high-rank record: ingestion conformance and smallest pair.
    let line = io::format_generator_record(&fixture(6611719866).map_err(e)?);
    let recs = io::parse_generators(line.as_bytes()).map_err(e)?;
    ensure(io::format_generator_record(&recs[0]) == line, || "record does not round-trip".into())?;
    let report = scan_record(&recs[0], BoxSpec::new(2), &ScanOptions::default()).map_err(e)?;
    let smallest: Vec<String> = report.smallest.iter().map(|w| w.c.to_string()).collect();
    ensure(smallest == ["30544225", "67119265"], || format!("smallest {smallest:?}"))?;
    let bytes = io::emit_scan_report(&report, Format::Text);
    ensure(io::parse_scan_report(&bytes).map_err(e)? == report, || "report round trip".into())?;
    notes.push("t=6611719866 hand-built record parses, round-trips, smallest 30544225/67119265".to_string());

    // Group law, triangle round trips and torsion-orbit invariance.
    let rec = fixture(210).map_err(e)?;
    let curve = rec.curve();
    for u in naive_vectors(2, 2) {
        for v in naive_vectors(2, 1) {
            let sum: Vec<i32> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            let lhs = curve.add(&rec.point(&u).map_err(e)?, &rec.point(&v).map_err(e)?);
            ensure(lhs == rec.point(&sum).map_err(e)?, || format!("P({u:?}) + P({v:?})"))?;
        }
        let p = rec.point(&u).map_err(e)?;
        let tri = point_to_triangle(curve, &p).map_err(e)?;
        let back = triangle_to_point(&tri).map_err(e)?;
        ensure(point_to_triangle(curve, &back).map_err(e)? == tri, || format!("round trip {u:?}"))?;
        let orbit = torsion_orbit_triangles(curve, &p).map_err(e)?;
        ensure(orbit.len() == 1 && orbit.contains(&tri.to_primitive().map_err(e)?), || {
            format!("torsion orbit {u:?}")
        })?;
    }
    notes.push("E_210 group law, triangle round trips, torsion orbits".into());

    // Determinism across thread counts, library and command line.
    let fixtures = fixture_records().map_err(e)?;
    let emit_all = |threads: usize| -> Result<Vec<u8>, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|x| x.to_string())?;
        pool.install(|| {
            let mut out = Vec::new();
            for rec in &fixtures {
                let report = scan_record(rec, BoxSpec::new(fixture_box(rec)), &ScanOptions::default()).map_err(e)?;
                out.extend(io::emit_scan_report(&report, Format::Text));
            }
            Ok(out)
        })
    };
    let one = emit_all(1)?;
    for threads in [2, 3, 8] {
        ensure(emit_all(threads)? == one, || format!("{threads} threads differ"))?;
    }
    let gens = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/generators.jsonl");
    let run_cli = |threads: &str| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let args = ["congruent", "scan", "--gens", gens, "--box", "5", "--threads", threads];
        let code = cli::run(args, &mut out, &mut err);
        (code, out)
    };
    let (code, reference) = run_cli("1");
    ensure(code == 0, || format!("scan exit {code}"))?;
    for threads in ["2", "7"] {
        ensure(run_cli(threads) == (0, reference.clone()), || format!("CLI output differs at {threads} threads"))?;
    }
    notes.push("reports byte-identical for 1, 2, 3, 8 threads".into());

    match std::env::var("CONGRUENT_HIGH_RANK_FILE") {
        Ok(path) => {
            let recs = io::parse_generator_file(std::path::Path::new(&path)).map_err(e)?;
            let rec = recs
                .iter()
                .find(|r| *r.t().get() == 6611719866u64)
                .ok_or("t = 6611719866 not in the supplied file")?;
            let report = scan_record(rec, BoxSpec::new(2), &ScanOptions::default()).map_err(e)?;
            let smallest: Vec<String> = report.smallest.iter().map(|w| w.c.to_string()).collect();
            ensure(smallest == ["30544225", "67119265"], || format!("dataset smallest {smallest:?}"))?;
            notes.push("dataset record for t=6611719866 gives 30544225/67119265".into());
        }
        Err(_) => notes.push("dataset check skipped (CONGRUENT_HIGH_RANK_FILE unset)".into()),
    }
    Ok(Outcome::Pass(notes.join("; ")))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("E_6 regression", c1_e6_regression),
        ("400g bit length", c2_large_multiple),
        ("E_34 closest pair", c3_e34),
        ("E_210 near miss", c4_e210),
        ("Tunnell verdicts", c5_tunnell),
        ("no collisions on fixtures", c6_no_collisions),
        ("box-count formula", c7_box_counts),
        ("oracle equivalence", c8_oracle),
        ("desk-scale substitutes", c9_substitutes),
    ];
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(Outcome::Fail);
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::KnownDiscrepancy(d) => ("FAIL", format!("known discrepancy: {d}")),
            Outcome::Fail(d) => {
                unexpected += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {status} {name}: {detail} [{secs:.2}s]", i + 1);
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
