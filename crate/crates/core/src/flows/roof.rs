use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// A positive roof over the 2-torus `(z, w)`.
pub trait Roof<S: Real> {
    fn eval(&self, z: S, w: S) -> S;
    fn lower(&self) -> S;
    fn upper(&self) -> S;
    /// Declared mean over the torus.
    fn mean(&self) -> S;

    /// `1/2 <= φ <= 3/2` with mean 1.
    fn in_stretch_band(&self) -> bool {
        let half = S::from_ratio(1, 2);
        let three_halves = S::from_ratio(3, 2);
        self.lower() >= half && self.upper() <= three_halves && self.mean() == S::one()
    }
}

/// Floating-point roof family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RoofFunction {
    Constant { value: f64 },
    /// `1 + a cos(2πz) + b cos(2πw)`, clipped to `[1/2, 3/2]`.
    Cosine { a: f64, b: f64 },
    /// `1/2 + {teeth * z}`: steep in `z`, so Birkhoff sums spread intervals
    /// in `z` quickly.
    Sawtooth { teeth: u32 },
}

impl Roof<f64> for RoofFunction {
    fn eval(&self, z: f64, w: f64) -> f64 {
        match *self {
            RoofFunction::Constant { value } => value,
            RoofFunction::Cosine { a, b } => {
                let v = 1.0 + a * libm::cos(2.0 * PI * z) + b * libm::cos(2.0 * PI * w);
                v.clamp(0.5, 1.5)
            }
            RoofFunction::Sawtooth { teeth } => 0.5 + (f64::from(teeth) * z).frac(),
        }
    }

    fn lower(&self) -> f64 {
        match *self {
            RoofFunction::Constant { value } => value,
            RoofFunction::Cosine { a, b } => (1.0 - a.abs() - b.abs()).max(0.5),
            RoofFunction::Sawtooth { .. } => 0.5,
        }
    }

    fn upper(&self) -> f64 {
        match *self {
            RoofFunction::Constant { value } => value,
            RoofFunction::Cosine { a, b } => (1.0 + a.abs() + b.abs()).min(1.5),
            RoofFunction::Sawtooth { .. } => 1.5,
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            RoofFunction::Constant { value } => value,
            // Exact while no clipping happens (|a| + |b| <= 1/2).
            RoofFunction::Cosine { .. } => 1.0,
            RoofFunction::Sawtooth { .. } => 1.0,
        }
    }
}

/// Roofs with rational values, usable in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExactRoof {
    Constant { num: i64, den: i64 },
    Sawtooth { teeth: u32 },
}

impl<S: Real> Roof<S> for ExactRoof {
    fn eval(&self, z: S, _w: S) -> S {
        match *self {
            ExactRoof::Constant { num, den } => S::from_ratio(num, den),
            ExactRoof::Sawtooth { teeth } => {
                S::from_ratio(1, 2) + (S::from_ratio(i64::from(teeth), 1) * z).frac()
            }
        }
    }

    fn lower(&self) -> S {
        match *self {
            ExactRoof::Constant { num, den } => S::from_ratio(num, den),
            ExactRoof::Sawtooth { .. } => S::from_ratio(1, 2),
        }
    }

    fn upper(&self) -> S {
        match *self {
            ExactRoof::Constant { num, den } => S::from_ratio(num, den),
            ExactRoof::Sawtooth { .. } => S::from_ratio(3, 2),
        }
    }

    fn mean(&self) -> S {
        match *self {
            ExactRoof::Constant { num, den } => S::from_ratio(num, den),
            ExactRoof::Sawtooth { .. } => S::one(),
        }
    }
}
