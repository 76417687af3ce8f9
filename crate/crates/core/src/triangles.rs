//! Right triangles attached to points of `E_t`, their primitive integer
//! forms, and the `(s, t)` parametrization of primitive triples.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rug::{Integer, Rational};

use crate::elliptic::{CongruentCurve, CurvePoint};
use crate::error::{Error, Result};
use crate::ntheory::{exact_sqrt, format_rational, squarefree_part, SquarefreeInt};

/// A right triangle with positive rational legs `a <= b` and hypotenuse `c`.
///
/// `t` is the squarefree class of the area: `ab/2 = t w^2` for some rational
/// `w`. Triangles obtained from points of `E_t` have area exactly `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalTriangle {
    a: Rational,
    b: Rational,
    c: Rational,
    t: SquarefreeInt,
}

impl RationalTriangle {
    /// Validates `a^2 + b^2 = c^2` with positive sides, in any leg order.
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        if a <= 0 || b <= 0 || c <= 0 {
            return Err(Error::Degenerate(format!(
                "non-positive side in ({}, {}, {})",
                format_rational(&a),
                format_rational(&b),
                format_rational(&c)
            )));
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if Rational::from(a.square_ref()) + Rational::from(b.square_ref()) != Rational::from(c.square_ref()) {
            return Err(Error::Degenerate(format!(
                "({}, {}, {}) is not a right triangle",
                format_rational(&a),
                format_rational(&b),
                format_rational(&c)
            )));
        }
        let (pa, pb, pc) = primitive_sides(&a, &b, &c);
        let st = StPair::from_sides(&pa, &pb, &pc)?;
        let (t, _) = st.area_class()?;
        Ok(RationalTriangle { a, b, c, t })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn t(&self) -> &SquarefreeInt {
        &self.t
    }

    pub fn area(&self) -> Rational {
        Rational::from(&self.a * &self.b) / 2u32
    }

    /// Scales to coprime integer sides and recovers `u` with `area = t u^2`.
    pub fn to_primitive(&self) -> Result<PrimitiveTriangle> {
        let (a, b, c) = primitive_sides(&self.a, &self.b, &self.c);
        let area = Integer::from(&a * &b) >> 1u32;
        let (quot, rem) = area.div_rem_ref(self.t.get()).into();
        let u = match (rem == 0).then(|| exact_sqrt(&quot)).flatten() {
            Some(u) => u,
            None => {
                return Err(Error::Invariant(format!(
                    "area of ({a}, {b}, {c}) is not {} times a square",
                    self.t
                )))
            }
        };
        Ok(PrimitiveTriangle {
            a,
            b,
            c,
            t: self.t.clone(),
            u,
        })
    }
}

impl fmt::Display for RationalTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            format_rational(&self.a),
            format_rational(&self.b),
            format_rational(&self.c)
        )
    }
}

/// Coprime integer sides proportional to the given positive rationals.
fn primitive_sides(a: &Rational, b: &Rational, c: &Rational) -> (Integer, Integer, Integer) {
    let lcd = a.denom().clone().lcm(b.denom()).lcm(c.denom());
    let scale = |r: &Rational| r.numer() * Integer::from(&lcd / r.denom());
    let (a, b, c) = (scale(a), scale(b), scale(c));
    let g = a.clone().gcd(&b).gcd(&c);
    (a / &g, b / &g, c / g)
}

/// A primitive integer right triangle `a <= b < c`, `gcd(a, b, c) = 1`,
/// whose area is `t u^2` with `t` squarefree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimitiveTriangle {
    a: Integer,
    b: Integer,
    c: Integer,
    t: SquarefreeInt,
    u: Integer,
}

impl PrimitiveTriangle {
    /// Validates a primitive triple given in any leg order and computes its
    /// area class by factoring the `(s, t)` parameters.
    pub fn new(a: Integer, b: Integer, c: Integer) -> Result<Self> {
        let st = StPair::from_sides(&a, &b, &c)?;
        let (t, u) = st.area_class()?;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Ok(PrimitiveTriangle { a, b, c, t, u })
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }

    pub fn b(&self) -> &Integer {
        &self.b
    }

    /// The hypotenuse.
    pub fn c(&self) -> &Integer {
        &self.c
    }

    pub fn t(&self) -> &SquarefreeInt {
        &self.t
    }

    pub fn u(&self) -> &Integer {
        &self.u
    }

    pub fn sides(&self) -> (&Integer, &Integer, &Integer) {
        (&self.a, &self.b, &self.c)
    }

    /// Primitive and leg-ordered, so similarity is equality of sides.
    pub fn similar(&self, other: &PrimitiveTriangle) -> bool {
        self.sides() == other.sides()
    }

    pub fn to_st(&self) -> StPair {
        StPair::from_sides(&self.a, &self.b, &self.c).expect("PrimitiveTriangle invariant")
    }
}

impl Ord for PrimitiveTriangle {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.c, &self.a, &self.b).cmp(&(&other.c, &other.a, &other.b))
    }
}

impl PartialOrd for PrimitiveTriangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrimitiveTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

pub fn similar(t1: &PrimitiveTriangle, t2: &PrimitiveTriangle) -> bool {
    t1.similar(t2)
}

/// Coprime `s > t > 0` of opposite parity; `(s^2 - t^2, 2st, s^2 + t^2)` is primitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StPair {
    s: Integer,
    t: Integer,
}

impl StPair {
    pub fn new(s: Integer, t: Integer) -> Result<Self> {
        if t <= 0 || s <= t {
            return Err(Error::InvalidStPair(format!("need s > t > 0, got ({s}, {t})")));
        }
        if s.is_odd() == t.is_odd() {
            return Err(Error::InvalidStPair(format!("({s}, {t}) have equal parity")));
        }
        if Integer::from(s.gcd_ref(&t)) != 1 {
            return Err(Error::InvalidStPair(format!("({s}, {t}) are not coprime")));
        }
        Ok(StPair { s, t })
    }

    /// Recovers `(s, t)` from a primitive triple via the odd leg:
    /// `s^2 = (c + odd)/2`, `t^2 = (c - odd)/2`.
    pub fn from_sides(a: &Integer, b: &Integer, c: &Integer) -> Result<Self> {
        let describe = || format!("({a}, {b}, {c})");
        if *a <= 0 || *b <= 0 || *c <= 0 {
            return Err(Error::NotPrimitive(describe()));
        }
        if Integer::from(a.square_ref()) + Integer::from(b.square_ref()) != Integer::from(c.square_ref()) {
            return Err(Error::NotPrimitive(format!("{} fails a^2 + b^2 = c^2", describe())));
        }
        if Integer::from(a.gcd_ref(b)) != 1 {
            return Err(Error::NotPrimitive(format!("{} has a common factor", describe())));
        }
        let odd = match (a.is_odd(), b.is_odd()) {
            (true, false) => a,
            (false, true) => b,
            _ => return Err(Error::NotPrimitive(describe())),
        };
        let s2 = Integer::from(c + odd) >> 1u32;
        let t2 = Integer::from(c - odd) >> 1u32;
        match (exact_sqrt(&s2), exact_sqrt(&t2)) {
            (Some(s), Some(t)) => StPair::new(s, t),
            _ => Err(Error::NotPrimitive(describe())),
        }
    }

    pub fn s(&self) -> &Integer {
        &self.s
    }

    pub fn t(&self) -> &Integer {
        &self.t
    }

    /// Squarefree class `(t, u)` of the area `s t (s - t)(s + t)`. The four
    /// factors are pairwise coprime, so each is decomposed separately.
    pub fn area_class(&self) -> Result<(SquarefreeInt, Integer)> {
        let factors = [
            self.s.clone(),
            self.t.clone(),
            Integer::from(&self.s - &self.t),
            Integer::from(&self.s + &self.t),
        ];
        let mut sf = Integer::from(1);
        let mut u = Integer::from(1);
        for f in &factors {
            let (a, b) = squarefree_part(f)?;
            sf *= a.get();
            u *= b;
        }
        Ok((SquarefreeInt::new_unchecked(sf), u))
    }

    pub fn to_triangle(&self) -> Result<PrimitiveTriangle> {
        let s2 = Integer::from(self.s.square_ref());
        let t2 = Integer::from(self.t.square_ref());
        let a = Integer::from(&s2 - &t2);
        let b = Integer::from(&self.s * &self.t) << 1u32;
        let c = s2 + t2;
        let (t, u) = self.area_class()?;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Ok(PrimitiveTriangle { a, b, c, t, u })
    }
}

pub fn st_to_triangle(pair: &StPair) -> Result<PrimitiveTriangle> {
    pair.to_triangle()
}

pub fn triangle_to_st(tri: &PrimitiveTriangle) -> StPair {
    tri.to_st()
}

/// `(X, Y) -> ((X^2 - t^2)/Y, 2tX/Y, (X^2 + t^2)/Y)`, made positive and leg-ordered.
pub fn point_to_triangle(curve: &CongruentCurve, p: &CurvePoint) -> Result<RationalTriangle> {
    let (x, y) = affine_non_torsion(p)?;
    let t = Rational::from(curve.t().get());
    let x2 = Rational::from(x.square_ref());
    let t2 = Rational::from(t.square_ref());
    let a = (Rational::from(&x2 - &t2) / y).abs();
    let b = (Rational::from(&t * x) * 2u32 / y).abs();
    let c = (x2 + t2) / y;
    let c = c.abs();
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    Ok(RationalTriangle {
        a,
        b,
        c,
        t: curve.t().clone(),
    })
}

/// `(a, b, c) -> (tb / (c - a), 2t^2 / (c - a))` for a triangle of area exactly `t`.
pub fn triangle_to_point(tri: &RationalTriangle) -> Result<CurvePoint> {
    if tri.area() != *tri.t.get() {
        return Err(Error::Degenerate(format!(
            "{tri} has area {}, not {}",
            format_rational(&tri.area()),
            tri.t
        )));
    }
    let diff = Rational::from(&tri.c - &tri.a);
    if diff == 0 {
        return Err(Error::Degenerate(format!("{tri} has c = a")));
    }
    let t = Rational::from(tri.t.get());
    let x = Rational::from(&t * &tri.b) / &diff;
    let y = Rational::from(t.square_ref()) * 2u32 / diff;
    Ok(CurvePoint::Affine { x, y })
}

/// Primitive triangle of a non-torsion point, computed directly from
/// `X = p/q^2`, `Y = r/q^3`: the sides scaled by `qr` are
/// `(|p^2 - t^2 q^4|, |2tpq^2|, p^2 + t^2 q^4)`, and `u = |qr| / g` where `g`
/// is their gcd.
pub fn point_to_primitive(curve: &CongruentCurve, p: &CurvePoint) -> Result<PrimitiveTriangle> {
    let (x, y) = affine_non_torsion(p)?;
    let q = exact_sqrt(x.denom()).ok_or_else(|| Error::Invariant(format!("X denominator of {p} is not a square")))?;
    primitive_from_parts(curve.t(), x.numer(), &q, y.numer())
}

/// The triangle of `X = p/q^2`, `Y = r/q^3` in lowest terms, `r != 0`.
pub(crate) fn primitive_from_parts(t: &SquarefreeInt, pn: &Integer, q: &Integer, r: &Integer) -> Result<PrimitiveTriangle> {
    let tv = t.get();
    let q2 = Integer::from(q.square_ref());
    let p2 = Integer::from(pn.square_ref());
    let t2q4 = Integer::from(tv.square_ref()) * Integer::from(q2.square_ref());
    let mut a = Integer::from(&p2 - &t2q4);
    a.abs_mut();
    let b = (Integer::from(tv * pn) * &q2 * 2u32).abs();
    let c = p2 + t2q4;
    // Every prime of gcd(a, b) divides 2t, and gcd(a, b) = gcd(a, 2t gcd(p, t^2)).
    let small = Integer::from(pn.gcd_ref(&Integer::from(tv.square_ref()))) * tv * 2u32;
    let g = a.clone().gcd(&small);
    let qr = Integer::from(q * r).abs();
    let (u, rem) = qr.div_rem(g.clone());
    if rem != 0 {
        return Err(Error::Invariant(format!("scale of X = {pn}/{q2} is not integral")));
    }
    let (a, b, c) = (a / &g, b / &g, c / g);
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    Ok(PrimitiveTriangle {
        a,
        b,
        c,
        t: t.clone(),
        u,
    })
}

/// Primitive triangles of the eight points `+-P + T`, `T` torsion. They
/// coincide, so the returned set has a single element.
pub fn torsion_orbit_triangles(curve: &CongruentCurve, p: &CurvePoint) -> Result<BTreeSet<PrimitiveTriangle>> {
    affine_non_torsion(p)?;
    let mut out = BTreeSet::new();
    for base in [p.clone(), p.negate()] {
        for tor in curve.torsion_points() {
            let q = curve.add(&base, &tor);
            out.insert(point_to_triangle(curve, &q)?.to_primitive()?);
        }
    }
    Ok(out)
}

fn affine_non_torsion(p: &CurvePoint) -> Result<(&Rational, &Rational)> {
    match p {
        CurvePoint::Affine { x, y } if !y.is_zero() => Ok((x, y)),
        _ => Err(Error::TorsionPoint(p.to_string())),
    }
}
