//! Exact group law on the congruent-number curves `E_t: Y^2 = X^3 - t^2 X`.

use std::fmt;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::ntheory::{exact_sqrt, format_rational, may_be_square_mod, SquarefreeInt};

/// `E_t` for a positive squarefree `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruentCurve {
    t: SquarefreeInt,
    t_sq: Integer,
}

/// A rational point of some [`CongruentCurve`], coordinates in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl CurvePoint {
    pub fn affine(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        CurvePoint::Affine {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    /// Infinity or a point with `Y = 0`; these are exactly the torsion points of `E_t`.
    pub fn is_torsion(&self) -> bool {
        match self {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { y, .. } => y.is_zero(),
        }
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }

    pub fn negate(&self) -> CurvePoint {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: Rational::from(-y),
            },
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { x, y } => {
                write!(f, "({}, {})", format_rational(x), format_rational(y))
            }
        }
    }
}

/// Naive height `max(|num X|, den X)` of an affine point.
pub fn naive_height(p: &CurvePoint) -> Result<Integer> {
    match p {
        CurvePoint::Infinity => Err(Error::TorsionPoint(p.to_string())),
        CurvePoint::Affine { x, .. } => {
            let num = x.numer().clone().abs();
            Ok(num.max(x.denom().clone()))
        }
    }
}

/// Limit on the number of `X = p/q^2` candidates [`CongruentCurve::find_small_points`] may test.
pub const DEFAULT_SEARCH_CANDIDATES: u64 = 1 << 32;

impl CongruentCurve {
    pub fn new(t: SquarefreeInt) -> Self {
        let t_sq = Integer::from(t.get().square_ref());
        // Discriminant of X^3 - t^2 X is 4 t^6, nonzero for t >= 1.
        assert!(t_sq > 0, "E_t needs t >= 1");
        CongruentCurve { t, t_sq }
    }

    pub fn t(&self) -> &SquarefreeInt {
        &self.t
    }

    pub(crate) fn t_squared(&self) -> &Integer {
        &self.t_sq
    }

    fn rhs(&self, x: &Rational) -> Rational {
        // x^3 - t^2 x = x (x^2 - t^2)
        let mut r = Rational::from(x.square_ref());
        r -= &self.t_sq;
        r *= x;
        r
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => Rational::from(y.square_ref()) == self.rhs(x),
        }
    }

    pub fn negate(&self, p: &CurvePoint) -> CurvePoint {
        p.negate()
    }

    /// Chord-tangent addition.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        if x1 == x2 {
            if y1 == y2 && !y1.is_zero() {
                return self.double(p);
            }
            // Vertical chord: q = -p, including the 2-torsion case.
            return CurvePoint::Infinity;
        }
        let slope = Rational::from(y2 - y1) / Rational::from(x2 - x1);
        self.finish_chord(slope, x1, y1, x2)
    }

    pub fn double(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { y, .. } if y.is_zero() => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                // (3x^2 - t^2) / 2y
                let mut num = Rational::from(x.square_ref());
                num *= 3;
                num -= &self.t_sq;
                let slope = num / Rational::from(y * 2u32);
                self.finish_chord(slope, x, y, x)
            }
        }
    }

    fn finish_chord(&self, slope: Rational, x1: &Rational, y1: &Rational, x2: &Rational) -> CurvePoint {
        let mut x3 = Rational::from(slope.square_ref());
        x3 -= x1;
        x3 -= x2;
        let mut y3 = Rational::from(x1 - &x3);
        y3 *= &slope;
        y3 -= y1;
        CurvePoint::Affine { x: x3, y: y3 }
    }

    /// `n * p` by double-and-add on `|n|`, negated at the end for `n < 0`.
    pub fn scalar_mul(&self, n: i64, p: &CurvePoint) -> CurvePoint {
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        let mut base = p.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base);
            }
        }
        if n < 0 {
            acc.negate()
        } else {
            acc
        }
    }

    /// `sum coeffs[i] * gens[i]`.
    pub fn linear_combination(&self, gens: &[CurvePoint], coeffs: &[i64]) -> Result<CurvePoint> {
        if gens.len() != coeffs.len() {
            return Err(Error::LengthMismatch {
                gens: gens.len(),
                coeffs: coeffs.len(),
            });
        }
        Ok(gens
            .iter()
            .zip(coeffs)
            .filter(|(_, &a)| a != 0)
            .fold(CurvePoint::Infinity, |acc, (g, &a)| {
                self.add(&acc, &self.scalar_mul(a, g))
            }))
    }

    /// `{O, (0,0), (t,0), (-t,0)}`.
    pub fn torsion_points(&self) -> [CurvePoint; 4] {
        let t = Rational::from(self.t.get());
        [
            CurvePoint::Infinity,
            CurvePoint::affine(0, 0),
            CurvePoint::affine(t.clone(), 0),
            CurvePoint::affine(-t, 0),
        ]
    }

    /// All points with `Y > 0` and `X = p/q^2`, `|p| <= bound`, `q^2 <= bound`,
    /// ordered by naive height then `X`.
    ///
    /// Exhaustive within the bound: every affine rational point of this
    /// Weierstrass form has `X = p/q^2` and `Y = r/q^3` in lowest terms.
    pub fn find_small_points(&self, bound: u64) -> Result<Vec<CurvePoint>> {
        self.find_small_points_with(bound, DEFAULT_SEARCH_CANDIDATES)
    }

    pub fn find_small_points_with(&self, bound: u64, max_candidates: u64) -> Result<Vec<CurvePoint>> {
        let q_max = crate::ntheory::isqrt(&Integer::from(bound)).to_u64().unwrap_or(u64::MAX);
        let candidates = (2 * u128::from(bound) + 1) * u128::from(q_max);
        if candidates > u128::from(max_candidates) {
            return Err(Error::BudgetExceeded(format!(
                "height bound {bound} needs {candidates} candidates, limit is {max_candidates}"
            )));
        }
        let t = self.t.get();
        let mut found: Vec<(Integer, CurvePoint)> = Vec::new();
        for q in 1..=q_max {
            let q2 = Integer::from(q) * q;
            let q4 = Integer::from(q2.square_ref());
            let t_q2 = Integer::from(t * &q2);
            let t2q4 = Integer::from(&self.t_sq * &q4);
            // Need p (p^2 - t^2 q^4) > 0: either -t q^2 < p < 0 or p > t q^2.
            let neg_lo = t_q2.to_u64().map_or(bound, |v| v.saturating_sub(1).min(bound));
            let pos_lo = t_q2.to_u64().map(|v| v.saturating_add(1));
            let negatives = (1..=neg_lo).map(|m| -(m as i128));
            let positives = pos_lo
                .filter(|&lo| lo <= bound)
                .into_iter()
                .flat_map(move |lo| lo..=bound)
                .map(|p| p as i128);
            for p in negatives.chain(positives) {
                if gcd_u64(p.unsigned_abs() as u64, q) != 1 {
                    continue;
                }
                let residue_ok = may_be_square_mod(|m| {
                    let m = i128::from(m);
                    let pm = p.rem_euclid(m);
                    let t2q4m = i128::from(t2q4.mod_u(m as u32));
                    ((pm * ((pm * pm - t2q4m).rem_euclid(m))).rem_euclid(m)) as u32
                });
                if !residue_ok {
                    continue;
                }
                let pz = Integer::from(p);
                let n = Integer::from(pz.square_ref()) - &t2q4;
                let n = n * &pz;
                if let Some(r) = exact_sqrt(&n) {
                    let q3 = Integer::from(&q2 * q);
                    let x = Rational::from((pz, q2.clone()));
                    let y = Rational::from((r, q3));
                    let pt = CurvePoint::Affine { x, y };
                    debug_assert!(self.contains(&pt));
                    found.push((naive_height(&pt)?, pt));
                }
            }
        }
        found.sort_by(|(ha, pa), (hb, pb)| ha.cmp(hb).then_with(|| pa.x().cmp(&pb.x())));
        Ok(found.into_iter().map(|(_, p)| p).collect())
    }

    /// Checks a point lies on the curve and returns it.
    pub fn checked(&self, p: CurvePoint) -> Result<CurvePoint> {
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::NotOnCurve {
                point: p.to_string(),
                t: self.t.get().clone(),
            })
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `num/den` helper for tests and fixtures.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from((num, den))
}
