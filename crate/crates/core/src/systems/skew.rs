use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::real::Real;

pub trait BaseMap<X> {
    fn step(&self, x: &X) -> X;
}

pub trait Cocycle<X, S> {
    fn eval(&self, x: &X) -> S;
}

impl<X, S, F: Fn(&X) -> S> Cocycle<X, S> for F {
    fn eval(&self, x: &X) -> S {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity;

impl<X: Clone> BaseMap<X> for Identity {
    fn step(&self, x: &X) -> X {
        x.clone()
    }
}

/// `x ↦ x + α mod 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation<S> {
    pub alpha: S,
}

impl<S: Real> BaseMap<S> for Rotation<S> {
    fn step(&self, x: &S) -> S {
        (*x + self.alpha).frac()
    }
}

/// `(z, w) ↦ (z + α, w + α') mod 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusRotation<S> {
    pub alpha: S,
    pub alpha_prime: S,
}

impl<S: Real> BaseMap<(S, S)> for TorusRotation<S> {
    fn step(&self, x: &(S, S)) -> (S, S) {
        ((x.0 + self.alpha).frac(), (x.1 + self.alpha_prime).frac())
    }
}

/// Step function of the first circle coordinate: `values[i]` on
/// `[breaks[i], breaks[i+1])`, with `breaks[0] = 0` and the last piece
/// running up to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleTable<S> {
    pub breaks: Vec<S>,
    pub values: Vec<S>,
}

impl<S: Real> CocycleTable<S> {
    pub fn lookup(&self, x: S) -> S {
        let i = self.breaks.iter().rposition(|&b| b <= x).unwrap_or(0);
        self.values[i]
    }
}

impl<S: Real> Cocycle<S, S> for CocycleTable<S> {
    fn eval(&self, x: &S) -> S {
        self.lookup(*x)
    }
}

impl<S: Real> Cocycle<(S, S), S> for CocycleTable<S> {
    fn eval(&self, x: &(S, S)) -> S {
        self.lookup(x.0)
    }
}

/// `T_h(x, θ) = (Tx, θ + h(x) mod modulus)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewSystem<B, H, S> {
    pub base: B,
    pub cocycle: H,
    pub modulus: S,
}

impl<S: Real, B, H> SkewSystem<B, H, S> {
    pub fn new(base: B, cocycle: H, modulus: S) -> Self {
        SkewSystem { base, cocycle, modulus }
    }

    pub fn step<X>(&self, (x, theta): &(X, S)) -> (X, S)
    where
        B: BaseMap<X>,
        H: Cocycle<X, S>,
    {
        let h = self.cocycle.eval(x).wrap(self.modulus);
        (self.base.step(x), (*theta + h).wrap(self.modulus))
    }

    pub fn orbit<X: Clone>(&self, start: (X, S), steps: usize) -> Vec<(X, S)>
    where
        B: BaseMap<X>,
        H: Cocycle<X, S>,
    {
        let mut out = Vec::with_capacity(steps + 1);
        let mut p = start;
        for _ in 0..steps {
            let next = self.step(&p);
            out.push(p);
            p = next;
        }
        out.push(p);
        out
    }

    /// `Σ_{i<m} h(T^i x)`, unreduced.
    pub fn cocycle_sum<X>(&self, x: &X, m: usize) -> S
    where
        B: BaseMap<X>,
        H: Cocycle<X, S>,
    {
        let mut sum = S::zero();
        let mut y = self.base.step(x);
        if m > 0 {
            sum = self.cocycle.eval(x);
        }
        for _ in 1..m {
            sum = sum + self.cocycle.eval(&y);
            y = self.base.step(&y);
        }
        sum
    }
}

/// Largest circle distance, over the samples `(x, u, v)`, between
/// `F ∘ (T_φ × R_α)` and `(T_ψ × R_α) ∘ F` where `F(x, u, v) = (x, u + v, v)`.
/// The two agree exactly when `ψ = φ + α`. Both sides move `x` by the same
/// base map, so only the circle coordinates are compared.
pub fn conjugacy_residual<S, X, P, Q>(phi: &P, psi: &Q, alpha: S, samples: &[(X, S, S)]) -> S
where
    S: Real,
    P: Cocycle<X, S>,
    Q: Cocycle<X, S>,
{
    let one = S::one();
    let mut worst = S::zero();
    for (x, u, v) in samples {
        // (T_φ × R_α), then F.
        let u1 = (*u + phi.eval(x)).frac();
        let v1 = (*v + alpha).frac();
        let left = ((u1 + v1).frac(), v1);
        // F, then (T_ψ × R_α).
        let u2 = (*u + *v).frac();
        let right = ((u2 + psi.eval(x)).frac(), (*v + alpha).frac());
        let d = left.0.circle_distance(right.0, one).max(left.1.circle_distance(right.1, one));
        worst = worst.max(d);
    }
    worst
}
