//! Scalars for circle and flow arithmetic: `f64` for simulations, exact
//! `Ratio<i64>` for identities.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::SignedRational;

pub trait Real:
    Copy
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn floor(self) -> Self;
    fn to_f64(self) -> f64;

    fn zero() -> Self {
        Self::from_ratio(0, 1)
    }

    fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    /// Fractional part in `[0, 1)`.
    fn frac(self) -> Self {
        self - self.floor()
    }

    /// Representative in `[0, modulus)`.
    fn wrap(self, modulus: Self) -> Self {
        let r = self - modulus * (self / modulus).floor();
        // Rounding can land exactly on the modulus in floating point.
        if r >= modulus || r < Self::zero() {
            Self::zero()
        } else {
            r
        }
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    /// Distance on the circle of length `modulus`.
    fn circle_distance(self, other: Self, modulus: Self) -> Self {
        let d = (self - other).wrap(modulus);
        let e = modulus - d;
        if d < e {
            d
        } else {
            e
        }
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn floor(self) -> Self {
        libm::floor(self)
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for SignedRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        SignedRational::new(num, den)
    }

    fn floor(self) -> Self {
        SignedRational::floor(&self)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
