use std::f64::consts::PI;

use crate::nvb::Domain;
use crate::{Error, Result};

/// Where a target's gradient fails to be smooth. Quadrature treats cells
/// near the locus specially.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SingularLocus {
    Point([f64; 2]),
    Circle { center: [f64; 2], radius: f64 },
}

pub trait Target: Send + Sync {
    fn name(&self) -> &str;
    fn value(&self, p: [f64; 2]) -> f64;
    fn gradient(&self, p: [f64; 2]) -> [f64; 2];

    fn singular_locus(&self) -> Option<SingularLocus> {
        None
    }

    /// The domain the target is meant to be approximated on.
    fn domain(&self) -> Domain {
        Domain::Square
    }
}

impl<T: Target + ?Sized> Target for Box<T> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn value(&self, p: [f64; 2]) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        (**self).gradient(p)
    }
    fn singular_locus(&self) -> Option<SingularLocus> {
        (**self).singular_locus()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
}

/// Polar angle in `[0, 2π)`.
fn angle(p: [f64; 2]) -> f64 {
    let t = p[1].atan2(p[0]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// `r^{2/3} sin(2θ/3)` on the L-shape, vanishing on both legs of the
/// re-entrant corner at the origin.
#[derive(Clone, Copy, Debug, Default)]
pub struct U1;

impl Target for U1 {
    fn name(&self) -> &str {
        "u1"
    }

    fn value(&self, p: [f64; 2]) -> f64 {
        let r = p[0].hypot(p[1]);
        r.powf(2.0 / 3.0) * (2.0 * angle(p) / 3.0).sin()
    }

    /// `(2/3) r^{-1/3} (-sin(θ/3), cos(θ/3))`.
    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        let s = 2.0 / 3.0 / r.cbrt();
        let t = angle(p) / 3.0;
        [-s * t.sin(), s * t.cos()]
    }

    fn singular_locus(&self) -> Option<SingularLocus> {
        Some(SingularLocus::Point([0.0, 0.0]))
    }

    fn domain(&self) -> Domain {
        Domain::LShape
    }
}

/// `max(0, 1/9 - |x|²)`: a quadratic bump whose gradient jumps across the
/// circle of radius 1/3.
#[derive(Clone, Copy, Debug, Default)]
pub struct U2;

impl U2 {
    pub const RADIUS: f64 = 1.0 / 3.0;
}

impl Target for U2 {
    fn name(&self) -> &str {
        "u2"
    }

    fn value(&self, p: [f64; 2]) -> f64 {
        (1.0 / 9.0 - (p[0] * p[0] + p[1] * p[1])).max(0.0)
    }

    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        if p[0] * p[0] + p[1] * p[1] < 1.0 / 9.0 {
            [-2.0 * p[0], -2.0 * p[1]]
        } else {
            [0.0, 0.0]
        }
    }

    fn singular_locus(&self) -> Option<SingularLocus> {
        Some(SingularLocus::Circle { center: [0.0, 0.0], radius: Self::RADIUS })
    }
}

/// `a + b x + c y`.
#[derive(Clone, Copy, Debug)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Self { a: 1.0, b: 2.0, c: -3.0 }
    }
}

impl Target for Affine {
    fn name(&self) -> &str {
        "affine"
    }
    fn value(&self, p: [f64; 2]) -> f64 {
        self.a + self.b * p[0] + self.c * p[1]
    }
    fn gradient(&self, _p: [f64; 2]) -> [f64; 2] {
        [self.b, self.c]
    }
}

/// `x²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct XSquared;

impl Target for XSquared {
    fn name(&self) -> &str {
        "xsq"
    }
    fn value(&self, p: [f64; 2]) -> f64 {
        p[0] * p[0]
    }
    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        [2.0 * p[0], 0.0]
    }
}

pub const TARGET_NAMES: [&str; 4] = ["u1", "u2", "affine", "xsq"];

pub fn target_by_name(name: &str) -> Result<Box<dyn Target>> {
    match name {
        "u1" => Ok(Box::new(U1)),
        "u2" => Ok(Box::new(U2)),
        "affine" => Ok(Box::new(Affine::default())),
        "xsq" => Ok(Box::new(XSquared)),
        _ => Err(Error::Config(format!(
            "unknown target `{name}` (expected one of {})",
            TARGET_NAMES.join(", ")
        ))),
    }
}
