use std::fmt;
use std::ops::Add;

/// A nonnegative real or `+∞`, with `1/0 = ∞`, `r + ∞ = ∞` and `1/∞ = 0`.
///
/// These are exactly the IEEE-754 conventions restricted to `[0, ∞]`, so the
/// wrapper only guards the domain.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const ZERO: Self = Self(0.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    /// Panics on negative or NaN input.
    pub fn new(v: f64) -> Self {
        assert!(v >= 0.0, "extended real must be nonnegative, got {v}");
        // normalise -0.0
        Self(v + 0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn recip(self) -> Self {
        Self(1.0 / self.0)
    }

    /// `1/x` for a nonnegative real.
    pub fn recip_of(x: f64) -> Self {
        Self::new(x).recip()
    }
}

impl Add for ExtendedReal {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl fmt::Debug for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("∞")
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

/// `(1/err + λ)⁻¹`, which is `err` itself when `λ = 0`.
pub fn marking_indicator(err: f64, lambda: ExtendedReal) -> f64 {
    if lambda.is_zero() {
        return err;
    }
    (ExtendedReal::recip_of(err) + lambda).recip().value()
}

/// Neumaier's compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conventions() {
        assert_eq!(ExtendedReal::recip_of(0.0), ExtendedReal::INFINITY);
        assert_eq!(ExtendedReal::INFINITY.recip(), ExtendedReal::ZERO);
        assert_eq!(ExtendedReal::new(3.0) + ExtendedReal::INFINITY, ExtendedReal::INFINITY);
    }

    #[test]
    fn indicator_values() {
        assert_eq!(marking_indicator(0.37, ExtendedReal::ZERO), 0.37);
        assert_eq!(marking_indicator(0.0, ExtendedReal::new(5.0)), 0.0);
        assert_eq!(marking_indicator(0.0, ExtendedReal::INFINITY), 0.0);
        assert_eq!(marking_indicator(1.0, ExtendedReal::new(1.0)), 0.5);
        assert_eq!(marking_indicator(2.0, ExtendedReal::INFINITY), 0.0);
    }

    #[test]
    fn compensated_sum_cancels() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    proptest! {
        #[test]
        fn indicator_vanishes_exactly_with_error(err in 0.0f64..1e6, lam in 0.0f64..1e6) {
            let mu = marking_indicator(err, ExtendedReal::new(lam));
            prop_assert_eq!(mu == 0.0, err == 0.0);
            prop_assert!(mu <= err);
        }
    }
}
