use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int =
        |t: &str| BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad integer {t:?}")));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Canonical `"p/q"` form (always with a denominator, `q > 0`).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Natural logarithm of a positive big integer, accurate to f64 precision
/// even when the integer itself overflows f64.
pub fn ln_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "ln of a non-positive integer");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(q: &Rational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

/// A point of the plane with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// Shorthand for `(xn/xd, yn/yd)`.
    pub fn frac(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(rat(xn, xd), rat(yn, yd))
    }

    pub fn origin() -> Self {
        Point::new(Rational::zero(), Rational::zero())
    }

    pub fn center() -> Self {
        Point::frac(1, 2, 1, 2)
    }

    pub fn dist2(&self, other: &Point) -> Rational {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }

    pub fn norm2(&self) -> Rational {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn scale(&self, s: &Rational) -> Point {
        Point::new(&self.x * s, &self.y * s)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::new(&self.x + &other.x, &self.y + &other.y)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }

    pub fn in_unit_square(&self) -> bool {
        let zero = Rational::zero();
        let one = Rational::one();
        self.x >= zero && self.x <= one && self.y >= zero && self.y <= one
    }

    /// L-infinity distance in floating point; only used for approximate matching.
    pub fn linf_f64(&self, other: &Point) -> f64 {
        let (ax, ay) = self.to_f64();
        let (bx, by) = other.to_f64();
        (ax - bx).abs().max((ay - by).abs())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The eight symmetries of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Identity,
    /// Quarter turn counter-clockwise about (1/2, 1/2).
    Rot90,
    Rot180,
    Rot270,
    /// Mirror in the vertical line x = 1/2.
    FlipX,
    /// Mirror in the horizontal line y = 1/2.
    FlipY,
    /// Mirror in the diagonal y = x.
    Diagonal,
    /// Mirror in the anti-diagonal x + y = 1.
    AntiDiagonal,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Rot90,
        Symmetry::Rot180,
        Symmetry::Rot270,
        Symmetry::FlipX,
        Symmetry::FlipY,
        Symmetry::Diagonal,
        Symmetry::AntiDiagonal,
    ];

    pub fn apply(self, p: &Point) -> Point {
        let one = Rational::one();
        let (x, y) = (&p.x, &p.y);
        let (nx, ny) = match self {
            Symmetry::Identity => (x.clone(), y.clone()),
            Symmetry::Rot90 => (&one - y, x.clone()),
            Symmetry::Rot180 => (&one - x, &one - y),
            Symmetry::Rot270 => (y.clone(), &one - x),
            Symmetry::FlipX => (&one - x, y.clone()),
            Symmetry::FlipY => (x.clone(), &one - y),
            Symmetry::Diagonal => (y.clone(), x.clone()),
            Symmetry::AntiDiagonal => (&one - y, &one - x),
        };
        Point::new(nx, ny)
    }

    /// Same map on f64 coordinates.
    pub fn apply_f64(self, (x, y): (f64, f64)) -> (f64, f64) {
        match self {
            Symmetry::Identity => (x, y),
            Symmetry::Rot90 => (1.0 - y, x),
            Symmetry::Rot180 => (1.0 - x, 1.0 - y),
            Symmetry::Rot270 => (y, 1.0 - x),
            Symmetry::FlipX => (1.0 - x, y),
            Symmetry::FlipY => (x, 1.0 - y),
            Symmetry::Diagonal => (y, x),
            Symmetry::AntiDiagonal => (1.0 - y, 1.0 - x),
        }
    }
}
