//! Special flows over the rotation `R_{α,α'}` of the 2-torus: time-`t` maps,
//! Birkhoff sums of the roof, fiber counts, stretch reports and Monte-Carlo
//! mixing correlations.

mod roof;

pub use roof::{ExactRoof, Roof, RoofFunction};

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hash::mix64;
use crate::real::Real;

/// A point `(z, w, s)` of the space under the roof, `0 <= s < φ(z, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowPoint<S> {
    pub z: S,
    pub w: S,
    pub s: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialFlow<S, R> {
    pub alpha: S,
    pub alpha_prime: S,
    pub roof: R,
}

impl<S: Real, R: Roof<S>> SpecialFlow<S, R> {
    pub fn new(alpha: S, alpha_prime: S, roof: R) -> Self {
        SpecialFlow { alpha, alpha_prime, roof }
    }

    pub fn base_step(&self, (z, w): (S, S)) -> (S, S) {
        ((z + self.alpha).frac(), (w + self.alpha_prime).frac())
    }

    pub fn base_inverse(&self, (z, w): (S, S)) -> (S, S) {
        ((z - self.alpha).frac(), (w - self.alpha_prime).frac())
    }

    pub fn roof_at(&self, (z, w): (S, S)) -> S {
        self.roof.eval(z, w)
    }

    pub fn contains(&self, p: &FlowPoint<S>) -> bool {
        p.s >= S::zero() && p.s < self.roof_at((p.z, p.w))
    }

    /// `f_m(x) = Σ_{i<m} φ(R^i x)`.
    pub fn birkhoff_sum(&self, x: (S, S), m: u64) -> S {
        let mut sum = S::zero();
        let mut y = x;
        for _ in 0..m {
            sum = sum + self.roof_at(y);
            y = self.base_step(y);
        }
        sum
    }

    /// `[f_0, f_1, …, f_m]`.
    pub fn birkhoff_sums(&self, x: (S, S), m: u64) -> Vec<S> {
        let mut out = Vec::with_capacity(m as usize + 1);
        let mut sum = S::zero();
        let mut y = x;
        out.push(sum);
        for _ in 0..m {
            sum = sum + self.roof_at(y);
            y = self.base_step(y);
            out.push(sum);
        }
        out
    }

    /// The time-`t` map: the height grows by `t`, and each time it reaches
    /// the roof the point drops to the base image. Negative `t` runs the
    /// flow backwards.
    pub fn time_t(&self, p: FlowPoint<S>, t: S) -> FlowPoint<S> {
        let mut x = (p.z, p.w);
        let mut s = p.s + t;
        if t >= S::zero() {
            loop {
                let r = self.roof_at(x);
                if s < r {
                    break;
                }
                s = s - r;
                x = self.base_step(x);
            }
        } else {
            while s < S::zero() {
                x = self.base_inverse(x);
                s = s + self.roof_at(x);
            }
        }
        FlowPoint { z: x.0, w: x.1, s }
    }

    /// Largest `m` with `t - f_m(x) >= 0`: the roof crossings of `(x, 0)`
    /// up to time `t`.
    pub fn fiber_count(&self, x: (S, S), t: S) -> u64 {
        let mut m = 0;
        let mut sum = S::zero();
        let mut y = x;
        loop {
            let next = sum + self.roof_at(y);
            if next > t {
                return m;
            }
            sum = next;
            y = self.base_step(y);
            m += 1;
        }
    }
}

/// Raw stretch data of `z ↦ f_m(z, w)` on an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    pub z0: f64,
    pub z1: f64,
    pub m: u64,
    /// `|f_m(z1) - f_m(z0)|`.
    pub total_stretch: f64,
    /// Largest distance between `f_m` and its chord over the samples.
    pub linear_deviation: f64,
    pub samples: usize,
}

impl StretchReport {
    /// Builds the report from samples `(z, f_m(z))` ordered by `z`.
    pub fn from_samples(m: u64, samples: &[(f64, f64)]) -> StretchReport {
        let (z0, f0) = samples[0];
        let (z1, f1) = samples[samples.len() - 1];
        let slope = if z1 > z0 { (f1 - f0) / (z1 - z0) } else { 0.0 };
        let linear_deviation = samples
            .iter()
            .map(|&(z, f)| (f - (f0 + slope * (z - z0))).abs())
            .fold(0.0, f64::max);
        StretchReport {
            z0,
            z1,
            m,
            total_stretch: (f1 - f0).abs(),
            linear_deviation,
            samples: samples.len(),
        }
    }

    /// `(ε, k)`-uniform: close to linear relative to its size, and large.
    pub fn is_uniform(&self, eps: f64, k: f64) -> bool {
        self.linear_deviation <= eps * self.total_stretch && self.total_stretch >= k
    }
}

/// Samples `f_m(·, w)` at `sample_count` equally spaced points of `[z0, z1]`.
pub fn stretch_report<R: Roof<f64>>(
    flow: &SpecialFlow<f64, R>,
    z0: f64,
    z1: f64,
    w: f64,
    m: u64,
    sample_count: usize,
) -> StretchReport {
    let n = sample_count.max(2);
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let z = z0 + (z1 - z0) * i as f64 / (n - 1) as f64;
            (z, flow.birkhoff_sum((z, w), m))
        })
        .collect();
    StretchReport::from_samples(m, &samples)
}

/// Fiber count at the left end, stretch across the interval, and the
/// return-count ratio `M(I) / Δf`, which is close to 1 when the roof averages
/// to 1 along the orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchDiagnostics {
    pub t: f64,
    pub n1: u64,
    pub delta_f: f64,
    pub m_i: u64,
    pub ratio: f64,
}

pub fn stretch_diagnostics<R: Roof<f64>>(
    flow: &SpecialFlow<f64, R>,
    z1: f64,
    z2: f64,
    w: f64,
    t: f64,
    delta: f64,
) -> StretchDiagnostics {
    let n1 = flow.fiber_count((z1, w), t);
    let delta_f = (flow.birkhoff_sum((z1, w), n1) - flow.birkhoff_sum((z2, w), n1)).abs();
    let mut y = (z2, w);
    for _ in 0..n1 {
        y = flow.base_step(y);
    }
    let m_i = flow.fiber_count(y, delta_f - delta);
    let ratio = if delta_f > 0.0 { m_i as f64 / delta_f } else { 0.0 };
    StretchDiagnostics { t, n1, delta_f, m_i, ratio }
}

/// A box `[z0, z1) × [w0, w1) × [s0, s1)` in flow coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSet {
    pub z: (f64, f64),
    pub w: (f64, f64),
    pub s: (f64, f64),
}

impl BoxSet {
    pub fn whole() -> Self {
        BoxSet { z: (0.0, 1.0), w: (0.0, 1.0), s: (0.0, f64::INFINITY) }
    }

    pub fn contains(&self, p: &FlowPoint<f64>) -> bool {
        let inside = |v: f64, (a, b): (f64, f64)| v >= a && v < b;
        inside(p.z, self.z) && inside(p.w, self.w) && inside(p.s, self.s)
    }
}

/// Counts from which the correlation estimate and its standard error follow;
/// batches merge by addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingAccumulator {
    pub n: u64,
    pub in_a: u64,
    pub in_b: u64,
    pub in_both: u64,
}

impl MixingAccumulator {
    pub fn merge(&mut self, other: &MixingAccumulator) {
        self.n += other.n;
        self.in_a += other.in_a;
        self.in_b += other.in_b;
        self.in_both += other.in_both;
    }

    /// `μ(A ∩ T^{-t}B) - μ(A)μ(B)` as the sample covariance of the two
    /// indicators, with its standard error.
    pub fn covariance(&self) -> (f64, f64) {
        if self.n == 0 {
            return (0.0, 0.0);
        }
        let n = self.n as f64;
        let exact = self.n as i128 * self.in_both as i128 - self.in_a as i128 * self.in_b as i128;
        let cov = exact as f64 / (n * n);
        let pa = self.in_a as f64 / n;
        let pb = self.in_b as f64 / n;
        // Joint cell frequencies of (1_A, 1_B∘T^t).
        let p11 = self.in_both as f64 / n;
        let p10 = pa - p11;
        let p01 = pb - p11;
        let p00 = 1.0 - p11 - p10 - p01;
        let term = |x: f64, y: f64, p: f64| {
            let d = (x - pa) * (y - pb);
            p * d * d
        };
        let second = term(1.0, 1.0, p11) + term(1.0, 0.0, p10) + term(0.0, 1.0, p01) + term(0.0, 0.0, p00);
        let var = (second - cov * cov).max(0.0);
        (cov, libm::sqrt(var / n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingEstimate {
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub mu_a: f64,
    pub mu_b: f64,
}

impl MixingEstimate {
    pub fn from_accumulator(t: f64, acc: &MixingAccumulator) -> Self {
        let (cov, se) = acc.covariance();
        let n = acc.n.max(1) as f64;
        MixingEstimate {
            t,
            estimate: cov.abs(),
            stderr: se,
            samples: acc.n,
            mu_a: acc.in_a as f64 / n,
            mu_b: acc.in_b as f64 / n,
        }
    }
}

/// Seed of batch `index` of a run with seed `seed`.
pub fn batch_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index))
}

/// Uniform point of the space under the roof, by rejection.
pub fn sample_point<R: Roof<f64>, G: Rng>(flow: &SpecialFlow<f64, R>, rng: &mut G) -> FlowPoint<f64> {
    let top = flow.roof.upper();
    loop {
        let z: f64 = rng.gen();
        let w: f64 = rng.gen();
        let s: f64 = rng.gen::<f64>() * top;
        if s < flow.roof_at((z, w)) {
            return FlowPoint { z, w, s };
        }
    }
}

/// One batch of `count` samples drawn with its own generator.
pub fn mixing_batch<R: Roof<f64>>(
    flow: &SpecialFlow<f64, R>,
    a: &BoxSet,
    b: &BoxSet,
    t: f64,
    count: u64,
    seed: u64,
) -> MixingAccumulator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = MixingAccumulator::default();
    for _ in 0..count {
        let p = sample_point(flow, &mut rng);
        let in_a = a.contains(&p);
        let in_b = b.contains(&flow.time_t(p, t));
        acc.n += 1;
        acc.in_a += u64::from(in_a);
        acc.in_b += u64::from(in_b);
        acc.in_both += u64::from(in_a && in_b);
    }
    acc
}

/// Monte-Carlo estimate of `|μ(A ∩ T^{-t}B) - μ(A)μ(B)|` over `samples`
/// points, split into batches of `batch` with independent seeds.
pub fn mixing_correlation<R: Roof<f64>>(
    flow: &SpecialFlow<f64, R>,
    a: &BoxSet,
    b: &BoxSet,
    t: f64,
    samples: u64,
    seed: u64,
    batch: u64,
) -> MixingEstimate {
    let batch = batch.max(1);
    let mut acc = MixingAccumulator::default();
    let mut done = 0;
    let mut index = 0;
    while done < samples {
        let count = batch.min(samples - done);
        acc.merge(&mixing_batch(flow, a, b, t, count, batch_seed(seed, index)));
        done += count;
        index += 1;
    }
    MixingEstimate::from_accumulator(t, &acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SignedRational;
    use proptest::prelude::*;

    fn golden() -> f64 {
        (libm::sqrt(5.0) - 1.0) / 2.0
    }

    fn cosine_flow() -> SpecialFlow<f64, RoofFunction> {
        SpecialFlow::new(libm::sqrt(2.0) - 1.0, libm::sqrt(3.0) - 1.0, RoofFunction::Cosine { a: 0.25, b: 0.2 })
    }

    /// Distance in the flow space, identifying `(x, φ(x))` with `(Rx, 0)`.
    fn flow_distance(f: &SpecialFlow<f64, RoofFunction>, p: FlowPoint<f64>, q: FlowPoint<f64>) -> f64 {
        let base = |a: (f64, f64), b: (f64, f64)| a.0.circle_distance(b.0, 1.0) + a.1.circle_distance(b.1, 1.0);
        let same = base((p.z, p.w), (q.z, q.w)) + (p.s - q.s).abs();
        let pr = f.base_step((p.z, p.w));
        let up = base(pr, (q.z, q.w)) + (f.roof_at((p.z, p.w)) - p.s) + q.s;
        let qr = f.base_step((q.z, q.w));
        let down = base(qr, (p.z, p.w)) + (f.roof_at((q.z, q.w)) - q.s) + p.s;
        same.min(up).min(down)
    }

    #[test]
    fn birkhoff_basics() {
        let f = SpecialFlow::new(golden(), 0.3, RoofFunction::Constant { value: 1.0 });
        assert_eq!(f.birkhoff_sum((0.1, 0.2), 0), 0.0);
        assert_eq!(f.birkhoff_sum((0.1, 0.2), 17), 17.0);
        let c = cosine_flow();
        let sums = c.birkhoff_sums((0.4, 0.7), 10_000);
        for (m, &s) in sums.iter().enumerate() {
            assert!(s >= m as f64 / 2.0 - 1e-9 && s <= 1.5 * m as f64 + 1e-9);
        }
    }

    #[test]
    fn time_t_cases() {
        let c = cosine_flow();
        let p = FlowPoint { z: 0.3, w: 0.6, s: 0.1 };
        assert_eq!(c.time_t(p, 0.0), p);
        let small = c.time_t(p, 0.2);
        assert_eq!((small.z, small.w), (p.z, p.w));
        assert!((small.s - 0.3).abs() < 1e-15);
    }

    #[test]
    fn fiber_count_examples() {
        let f = SpecialFlow::new(golden(), 0.3, RoofFunction::Constant { value: 1.0 });
        assert_eq!(f.fiber_count((0.5, 0.5), 7.3), 7);
        assert_eq!(f.fiber_count((0.5, 0.5), 0.9), 0);
        let c = cosine_flow();
        for m in [0u64, 1, 5, 100, 1000] {
            let x = (0.123, 0.77);
            assert_eq!(c.fiber_count(x, c.birkhoff_sum(x, m)), m);
        }
    }

    #[test]
    fn exact_flow_law() {
        let q = SignedRational::new;
        let f = SpecialFlow::new(q(5, 13), q(2, 7), ExactRoof::Sawtooth { teeth: 3 });
        let p = FlowPoint { z: q(1, 9), w: q(4, 11), s: q(1, 5) };
        for (s, t) in [(q(3, 2), q(17, 3)), (q(0, 1), q(41, 7)), (q(9, 4), q(-5, 3))] {
            assert_eq!(f.time_t(f.time_t(p, t), s), f.time_t(p, s + t));
        }
        let x = (p.z, p.w);
        let sums = f.birkhoff_sums(x, 50);
        let mut y = x;
        for m in 0..50 {
            assert_eq!(sums[m + 1] - sums[m], f.roof_at(y));
            y = f.base_step(y);
        }
        assert!(<ExactRoof as Roof<SignedRational>>::in_stretch_band(&ExactRoof::Sawtooth { teeth: 3 }));
    }

    #[test]
    fn stretch_examples() {
        let f = SpecialFlow::new(golden(), 0.3, RoofFunction::Constant { value: 1.0 });
        let r = stretch_report(&f, 0.1, 0.2, 0.5, 500, 16);
        assert_eq!(r.total_stretch, 0.0);
        let linear: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 / 10.0, i as f64 / 10.0)).collect();
        let r = StretchReport::from_samples(1, &linear);
        assert!(r.linear_deviation < 1e-15);
        assert!((r.total_stretch - 0.9).abs() < 1e-15);
        let c = cosine_flow();
        // A trigonometric roof over this rotation is a coboundary, so its
        // Birkhoff sums stay within a bounded distance of `m`.
        let r = stretch_report(&c, 0.1, 0.6, 0.5, 10_000, 32);
        assert!(r.total_stretch < 2.0, "{r:?}");
    }

    #[test]
    fn whole_space_has_zero_correlation() {
        let c = cosine_flow();
        let est = mixing_correlation(&c, &BoxSet::whole(), &BoxSet::whole(), 25.0, 2000, 3, 500);
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.mu_a, 1.0);
    }

    #[test]
    fn volume_is_preserved() {
        let c = cosine_flow();
        let set = BoxSet { z: (0.0, 0.5), w: (0.2, 0.9), s: (0.0, 0.7) };
        let n = 40_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut before, mut after) = (0u64, 0u64);
        for _ in 0..n {
            let p = sample_point(&c, &mut rng);
            before += u64::from(set.contains(&p));
            after += u64::from(set.contains(&c.time_t(p, -37.5)));
        }
        let (pb, pa) = (before as f64 / n as f64, after as f64 / n as f64);
        let se = libm::sqrt(pb * (1.0 - pb) / n as f64) * core::f64::consts::SQRT_2;
        assert!((pb - pa).abs() <= 3.0 * se, "{pb} vs {pa}");
    }

    proptest! {
        #[test]
        fn float_flow_law(z in 0.0f64..1.0, w in 0.0f64..1.0, h in 0.0f64..1.0, s in 0.0f64..50.0, t in 0.0f64..50.0) {
            let c = cosine_flow();
            let p = FlowPoint { z, w, s: h * c.roof_at((z, w)) };
            let lhs = c.time_t(c.time_t(p, t), s);
            let rhs = c.time_t(p, s + t);
            prop_assert!(c.contains(&lhs) && c.contains(&rhs));
            prop_assert!(flow_distance(&c, lhs, rhs) <= 1e-9);
        }
    }
}
