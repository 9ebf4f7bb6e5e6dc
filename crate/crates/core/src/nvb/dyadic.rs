//! Exact dyadic rationals and the geometric predicates built on them.
//!
//! Bisection only ever takes midpoints, so every vertex of every mesh lives
//! on a dyadic grid. Keeping coordinates exact makes vertex interning and
//! the orientation tests used for neighbour search free of rounding.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::{Error, Result};

/// Largest supported exponent; `2^-56` is the finest grid spacing.
pub const MAX_EXPONENT: u32 = 56;
/// Coordinates must satisfy `|x| < COORD_BOUND`.
pub const COORD_BOUND: i64 = 32;

/// `num / 2^exp`, normalised so that `num` is odd unless `exp == 0`.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Hash for Dyadic {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.exp.hash(state);
    }
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };

    pub fn new(num: i64, exp: u32) -> Result<Self> {
        Self::from_wide(num as i128, exp)
    }

    pub fn from_int(v: i64) -> Result<Self> {
        Self::new(v, 0)
    }

    fn from_wide(mut num: i128, mut exp: u32) -> Result<Self> {
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        if num == 0 {
            exp = 0;
        }
        if exp > MAX_EXPONENT {
            return Err(Error::Resolution(format!(
                "needs 2^-{exp} resolution, at most 2^-{MAX_EXPONENT} is supported"
            )));
        }
        let bound = (COORD_BOUND as i128) << exp;
        if num.abs() >= bound {
            return Err(Error::Resolution(format!(
                "|{num}/2^{exp}| exceeds the coordinate bound {COORD_BOUND}"
            )));
        }
        Ok(Self { num: num as i64, exp })
    }

    /// Exact conversion; fails for values that are not representable.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Resolution(format!("{x} is not finite")));
        }
        if x == 0.0 {
            return Ok(Self::ZERO);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (mant, e2) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1i128 << 52), raw_exp - 1075)
        };
        // x = sign * mant * 2^e2
        let mut mant = mant;
        let mut e2 = e2;
        while mant % 2 == 0 && e2 < 0 {
            mant /= 2;
            e2 += 1;
        }
        if e2 >= 0 {
            if e2 > 10 {
                return Err(Error::Resolution(format!("{x} exceeds the coordinate bound")));
            }
            Self::from_wide(sign * (mant << e2), 0)
        } else {
            let exp = (-e2) as u32;
            if exp > MAX_EXPONENT {
                return Err(Error::Resolution(format!("{x} is finer than 2^-{MAX_EXPONENT}")));
            }
            Self::from_wide(sign * mant, exp)
        }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    /// Exact, since the numerator stays below 2^53 for all supported values.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / (2f64).powi(self.exp as i32)
    }

    /// Numerator with respect to the grid `2^-exp` (requires `exp >= self.exp`).
    fn scaled(self, exp: u32) -> i128 {
        (self.num as i128) << (exp - self.exp)
    }

    pub fn midpoint(a: Dyadic, b: Dyadic) -> Result<Dyadic> {
        let e = a.exp.max(b.exp);
        Self::from_wide(a.scaled(e) + b.scaled(e), e + 1)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled(e).cmp(&other.scaled(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DyadicPoint {
    pub x: Dyadic,
    pub y: Dyadic,
}

impl DyadicPoint {
    pub fn new(x: Dyadic, y: Dyadic) -> Self {
        Self { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Result<Self> {
        Ok(Self::new(Dyadic::from_f64(x)?, Dyadic::from_f64(y)?))
    }

    pub fn to_f64(self) -> [f64; 2] {
        [self.x.to_f64(), self.y.to_f64()]
    }

    pub fn midpoint(a: Self, b: Self) -> Result<Self> {
        Ok(Self::new(Dyadic::midpoint(a.x, b.x)?, Dyadic::midpoint(a.y, b.y)?))
    }
}

fn common_exp(points: &[DyadicPoint]) -> u32 {
    points.iter().map(|p| p.x.exp.max(p.y.exp)).max().unwrap_or(0)
}

/// Sign of `(b - a) × (d - c)`. Exact: with the coordinate bound and maximal
/// exponent every intermediate fits in an `i128`.
pub fn cross_sign(a: DyadicPoint, b: DyadicPoint, c: DyadicPoint, d: DyadicPoint) -> i32 {
    let e = common_exp(&[a, b, c, d]);
    let (ax, ay) = (a.x.scaled(e), a.y.scaled(e));
    let (bx, by) = (b.x.scaled(e), b.y.scaled(e));
    let (cx, cy) = (c.x.scaled(e), c.y.scaled(e));
    let (dx, dy) = (d.x.scaled(e), d.y.scaled(e));
    let v = (bx - ax) * (dy - cy) - (by - ay) * (dx - cx);
    v.signum() as i32
}

/// Orientation of the triple: positive for counter-clockwise.
pub fn orient(a: DyadicPoint, b: DyadicPoint, c: DyadicPoint) -> i32 {
    cross_sign(a, b, a, c)
}

/// Sign of `(b - a) · (c - a)`.
pub fn dot_sign(a: DyadicPoint, b: DyadicPoint, c: DyadicPoint) -> i32 {
    let e = common_exp(&[a, b, c]);
    let (ax, ay) = (a.x.scaled(e), a.y.scaled(e));
    let v = (b.x.scaled(e) - ax) * (c.x.scaled(e) - ax) + (b.y.scaled(e) - ay) * (c.y.scaled(e) - ay);
    v.signum() as i32
}

/// Whether `p` lies on the closed segment `[a, b]`.
pub fn on_segment(a: DyadicPoint, b: DyadicPoint, p: DyadicPoint) -> bool {
    orient(a, b, p) == 0 && dot_sign(a, b, p) >= 0 && dot_sign(b, a, p) >= 0
}

/// Whether `p` lies in the relative interior of the segment `[a, b]`.
pub fn strictly_inside_segment(a: DyadicPoint, b: DyadicPoint, p: DyadicPoint) -> bool {
    p != a && p != b && on_segment(a, b, p)
}
