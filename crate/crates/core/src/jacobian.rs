//! Division-free group law on `E_t` in Jacobian coordinates, `x = X/Z^2`,
//! `y = Y/Z^3`. Used by the box walk, where one gcd per point replaces the
//! several that rational arithmetic needs per addition.

use rug::{Integer, Rational};

use crate::elliptic::{CongruentCurve, CurvePoint};
use crate::error::{Error, Result};
use crate::ntheory::exact_sqrt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Jacobian {
    Infinity,
    Point { x: Integer, y: Integer, z: Integer },
}

/// A point in lowest terms: `x = p/q^2`, `y = r/q^3`, `q > 0`, `gcd(p, q) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Reduced {
    Infinity,
    Point { p: Integer, q: Integer, r: Integer },
}

impl Reduced {
    pub fn is_torsion(&self) -> bool {
        match self {
            Reduced::Infinity => true,
            Reduced::Point { r, .. } => r.is_zero(),
        }
    }

    pub fn from_affine(point: &CurvePoint) -> Result<Self> {
        match point {
            CurvePoint::Infinity => Ok(Reduced::Infinity),
            CurvePoint::Affine { x, y } => {
                let q = exact_sqrt(x.denom())
                    .ok_or_else(|| Error::Invariant(format!("X denominator of {point} is not a square")))?;
                if *y.denom() != Integer::from(q.square_ref()) * &q {
                    return Err(Error::Invariant(format!("Y denominator of {point} is not q^3")));
                }
                Ok(Reduced::Point {
                    p: x.numer().clone(),
                    q,
                    r: y.numer().clone(),
                })
            }
        }
    }

    pub fn to_affine(&self) -> CurvePoint {
        match self {
            Reduced::Infinity => CurvePoint::Infinity,
            Reduced::Point { p, q, r } => {
                let q2 = Integer::from(q.square_ref());
                let q3 = Integer::from(&q2 * q);
                CurvePoint::affine(Rational::from((p, q2)), Rational::from((r, q3)))
            }
        }
    }

    pub fn negate(&self) -> Reduced {
        match self {
            Reduced::Infinity => Reduced::Infinity,
            Reduced::Point { p, q, r } => Reduced::Point {
                p: p.clone(),
                q: q.clone(),
                r: Integer::from(-r),
            },
        }
    }

    pub fn into_jacobian(self) -> Jacobian {
        match self {
            Reduced::Infinity => Jacobian::Infinity,
            Reduced::Point { p, q, r } => Jacobian::Point { x: p, y: r, z: q },
        }
    }

    pub fn to_jacobian(&self) -> Jacobian {
        match self {
            Reduced::Infinity => Jacobian::Infinity,
            Reduced::Point { p, q, r } => Jacobian::Point {
                x: p.clone(),
                y: r.clone(),
                z: q.clone(),
            },
        }
    }

    /// `max(|p|, q^2)`.
    pub fn naive_height(&self) -> Option<Integer> {
        match self {
            Reduced::Infinity => None,
            Reduced::Point { p, q, .. } => Some(Integer::from(p.abs_ref()).max(Integer::from(q.square_ref()))),
        }
    }
}

impl Jacobian {
    pub fn reduce(&self) -> Result<Reduced> {
        let Jacobian::Point { x, y, z } = self else {
            return Ok(Reduced::Infinity);
        };
        // v(gcd(x, z^2)) = min(v(x), 2 v(z)), so gcd(x, z^2) = g gcd(x/g, z) with g = gcd(x, z).
        let g = Integer::from(x.gcd_ref(z));
        let x_g = Integer::from(x.div_exact_ref(&g));
        let h = Integer::from(x_g.gcd_ref(z));
        let p = x_g.div_exact(&h);
        let d = g * h;
        // z = q w with w^2 = d, so y / z^3 = (y / w^3) / q^3.
        let w = exact_sqrt(&d).ok_or_else(|| Error::Invariant(format!("X denominator cofactor {d} is not a square")))?;
        let q = Integer::from(z.abs_ref()).div_exact(&w);
        let w3 = Integer::from(w.square_ref()) * &w;
        let (mut r, rem) = y.clone().div_rem(w3);
        if rem != 0 {
            return Err(Error::Invariant("Y numerator does not reduce with X".into()));
        }
        if *z < 0 {
            r = -r;
        }
        Ok(Reduced::Point { p, q, r })
    }
}

impl CongruentCurve {
    pub(crate) fn jacobian_add(&self, a: &Jacobian, b: &Jacobian) -> Jacobian {
        let (x1, y1, z1, x2, y2, z2) = match (a, b) {
            (Jacobian::Infinity, _) => return b.clone(),
            (_, Jacobian::Infinity) => return a.clone(),
            (Jacobian::Point { x: x1, y: y1, z: z1 }, Jacobian::Point { x: x2, y: y2, z: z2 }) => {
                (x1, y1, z1, x2, y2, z2)
            }
        };
        let z1s = Integer::from(z1.square_ref());
        let z2s = Integer::from(z2.square_ref());
        let u1 = Integer::from(x1 * &z2s);
        let u2 = Integer::from(x2 * &z1s);
        let s1 = Integer::from(y1 * z2) * &z2s;
        let s2 = Integer::from(y2 * z1) * &z1s;
        let h = u2 - &u1;
        let r = s2 - &s1;
        if h.is_zero() {
            if r.is_zero() {
                return self.jacobian_double(a);
            }
            return Jacobian::Infinity;
        }
        let h2 = Integer::from(h.square_ref());
        let h3 = Integer::from(&h2 * &h);
        let u1h2 = u1 * &h2;
        // x3 = r^2 - h^3 - 2 u1 h^2
        let mut x3 = Integer::from(r.square_ref());
        x3 -= &h3;
        x3 -= Integer::from(&u1h2 * 2u32);
        // y3 = r (u1 h^2 - x3) - s1 h^3
        let mut y3 = u1h2 - &x3;
        y3 *= &r;
        y3 -= s1 * h3;
        let z3 = h * z1 * z2;
        Jacobian::Point { x: x3, y: y3, z: z3 }
    }

    pub(crate) fn jacobian_double(&self, a: &Jacobian) -> Jacobian {
        let Jacobian::Point { x, y, z } = a else {
            return Jacobian::Infinity;
        };
        if y.is_zero() {
            return Jacobian::Infinity;
        }
        let y2 = Integer::from(y.square_ref());
        // s = 4 x y^2, m = 3 x^2 - t^2 z^4
        let s = Integer::from(x * &y2) * 4u32;
        let z2 = Integer::from(z.square_ref());
        let mut m = Integer::from(x.square_ref()) * 3u32;
        m -= Integer::from(z2.square_ref()) * self.t_squared();
        let mut x3 = Integer::from(m.square_ref());
        x3 -= Integer::from(&s * 2u32);
        let mut y3 = s - &x3;
        y3 *= &m;
        y3 -= Integer::from(y2.square_ref()) * 8u32;
        let z3 = Integer::from(y * z) * 2u32;
        Jacobian::Point { x: x3, y: y3, z: z3 }
    }
}
