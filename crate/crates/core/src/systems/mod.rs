//! Cutting-and-stacking towers, integer roof towers over them, skew products
//! over rotations and Birkhoff averages.

mod roof;
mod skew;
mod tower;

pub use roof::{IntegerRoof, RoofPoint, RoofRun, RoofTower};
pub use skew::{conjugacy_residual, BaseMap, Cocycle, CocycleTable, Identity, Rotation, SkewSystem, TorusRotation};
pub use tower::{
    build_tower, expected_mass, kac_sum, repetition_cells, Cell, Column, LevelCell, Return, StackingPlan, SystemError,
    TowerSystem, MAX_PLAN_SLOTS,
};

use crate::real::Real;
use crate::Rational;

/// Fraction of the first `n` orbit points of `start` that satisfy `hit`.
pub fn birkhoff_average<X, F, I>(step: F, mut hit: I, start: X, n: u64) -> Rational
where
    F: Fn(&X) -> X,
    I: FnMut(&X) -> bool,
{
    let mut x = start;
    let mut count = 0;
    for i in 0..n {
        count += u64::from(hit(&x));
        if i + 1 < n {
            x = step(&x);
        }
    }
    Rational::new(count, n.max(1))
}

/// Cell of the four-set partition of `T² × [0, t0)` generated by
/// `R1 = [0,1/2)² × [0, t0)` and `R2 = T² × [0, t0/2)`:
/// index `2·[p ∈ R1] + [p ∈ R2]`.
pub fn u_partition_cell<S: Real>(z: S, w: S, theta: S, t0: S) -> usize {
    let half = S::from_ratio(1, 2);
    let r1 = z < half && w < half;
    let r2 = theta < t0 * half;
    2 * usize::from(r1) + usize::from(r2)
}

/// Masses of the four cells of [`u_partition_cell`], in index order.
pub fn u_partition_masses() -> [Rational; 4] {
    [Rational::new(3, 8), Rational::new(3, 8), Rational::new(1, 8), Rational::new(1, 8)]
}

/// The map `U(z, w, θ) = (R(z, w), θ + φ(z, w) mod t0)`.
pub fn u_system<S: Real, H>(alpha: S, alpha_prime: S, roof: H, t0: S) -> SkewSystem<TorusRotation<S>, H, S> {
    SkewSystem::new(TorusRotation { alpha, alpha_prime }, roof, t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SignedRational;
    use alloc::vec::Vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn golden_rotation_equidistributes() {
        let a = (libm::sqrt(5.0) - 1.0) / 2.0;
        let r = Rotation { alpha: a };
        let freq = birkhoff_average(|x| r.step(x), |&x| x < 0.5, 0.0f64, 100_000);
        let f = *freq.numer() as f64 / *freq.denom() as f64;
        assert!((f - 0.5).abs() <= 1e-3, "{f}");
        assert_eq!(birkhoff_average(|x| r.step(x), |_| true, 0.3f64, 1000), Rational::from_integer(1));
    }

    #[test]
    fn skew_trivial_cases() {
        let q = SignedRational::new;
        let zero = SkewSystem::new(Rotation { alpha: q(1, 3) }, |_: &SignedRational| q(0, 1), q(1, 1));
        assert_eq!(zero.step(&(q(1, 2), q(1, 5))), (q(5, 6), q(1, 5)));
        let pure = SkewSystem::new(Identity, |_: &SignedRational| q(2, 7), q(1, 1));
        let orbit = pure.orbit((q(1, 2), q(0, 1)), 4);
        assert_eq!(orbit[4], (q(1, 2), q(1, 7)));
    }

    #[test]
    fn conjugacy_identity_float_and_control() {
        let alpha = libm::sqrt(2.0) - 1.0;
        let phi = |x: &f64| 0.3 * libm::sin(2.0 * core::f64::consts::PI * *x) + 0.1;
        let psi = |x: &f64| phi(x) + alpha;
        let off = |x: &f64| phi(x) + alpha + 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<(f64, f64, f64)> = (0..10_000).map(|_| (rng.gen(), rng.gen(), rng.gen())).collect();
        assert!(conjugacy_residual(&phi, &psi, alpha, &samples) <= 1e-12);
        assert!(conjugacy_residual(&phi, &off, alpha, &samples) >= 5e-4);
    }

    #[test]
    fn u_partition() {
        let masses = u_partition_masses();
        assert_eq!(masses.iter().fold(Rational::from_integer(0), |a, &b| a + b), Rational::from_integer(1));
        assert_eq!(u_partition_cell(0.1, 0.2, 0.1, 1.0), 3);
        assert_eq!(u_partition_cell(0.7, 0.2, 0.9, 1.0), 0);
        let u = u_system(libm::sqrt(2.0) - 1.0, libm::sqrt(3.0) - 1.0, |p: &(f64, f64)| 0.5 + p.0, 1.0);
        let mut counts = [0u64; 4];
        for (x, th) in u.orbit(((0.1, 0.2), 0.0), 100_000) {
            counts[u_partition_cell(x.0, x.1, th, 1.0)] += 1;
        }
        for (c, m) in counts.iter().zip(masses) {
            let expect = *m.numer() as f64 / *m.denom() as f64;
            assert!((*c as f64 / 100_001.0 - expect).abs() < 0.01);
        }
    }

    fn rational() -> impl Strategy<Value = SignedRational> {
        (0i64..997, 1i64..997).prop_map(|(a, b)| SignedRational::new(a % b, b))
    }

    proptest! {
        #[test]
        fn exact_conjugacy(alpha in rational(), pts in proptest::collection::vec((rational(), rational(), rational()), 1..20), c in rational()) {
            let phi = |x: &SignedRational| (*x * SignedRational::new(3, 1) + c).frac();
            let psi = |x: &SignedRational| phi(x) + alpha;
            prop_assert_eq!(conjugacy_residual(&phi, &psi, alpha, &pts), SignedRational::new(0, 1));
        }

        #[test]
        fn skew_phase_is_birkhoff_sum(alpha in rational(), x in rational(), theta in rational(), m in 0usize..40) {
            let table = CocycleTable {
                breaks: alloc::vec![SignedRational::new(0, 1), SignedRational::new(1, 3)],
                values: alloc::vec![SignedRational::new(2, 5), SignedRational::new(7, 4)],
            };
            let sys = SkewSystem::new(Rotation { alpha }, table, SignedRational::new(1, 1));
            let end = sys.orbit((x, theta), m)[m];
            prop_assert_eq!(end.1, (theta + sys.cocycle_sum(&x, m)).frac());
        }
    }
}
