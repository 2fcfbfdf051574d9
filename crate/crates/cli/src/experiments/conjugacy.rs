use std::f64::consts::PI;

use kakutani_core::real::Real;
use kakutani_core::systems::{conjugacy_residual, CocycleTable};
use kakutani_core::SignedRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{num, Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::formats::format_rational;
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-conjugacy",
    description: "F(x,u,v) = (x,u+v,v) conjugates T_phi x R_alpha to T_psi x R_alpha with psi = phi + alpha",
    modes: &[Mode::Rational, Mode::Float],
    params: &[
        ParamSpec { name: "rational_points", kind: ParamKind::Int { min: 1, max: 10_000_000 }, default: "1000", doc: "samples in rational mode" },
        ParamSpec { name: "max_denominator", kind: ParamKind::Int { min: 1, max: 100_000 }, default: "997", doc: "denominators of random rationals" },
        ParamSpec { name: "float_points", kind: ParamKind::Int { min: 1, max: 10_000_000 }, default: "10000", doc: "samples in float mode" },
        ParamSpec { name: "alpha", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.41421356237309503", doc: "float-mode rotation angle" },
        ParamSpec { name: "tolerance", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "1e-12", doc: "float-mode pass threshold" },
        ParamSpec { name: "perturbation", kind: ParamKind::Float { min: 0.0, max: 0.5 }, default: "1e-3", doc: "offset added to psi in the control run" },
        ParamSpec { name: "control_min", kind: ParamKind::Float { min: 0.0, max: 0.5 }, default: "5e-4", doc: "the control residual must reach this" },
    ],
    run,
};

fn random_rational(rng: &mut ChaCha8Rng, max_den: i64) -> SignedRational {
    let q = rng.gen_range(1..=max_den);
    SignedRational::new(rng.gen_range(0..q), q)
}

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut out = Outcome::default();
    let mut table = Table::new(&["mode", "points", "alpha", "residual", "control_residual"]);
    match ctx.mode {
        Mode::Rational => {
            let max_den = p.int("max_denominator");
            let alpha = random_rational(&mut rng, max_den);
            let breaks: Vec<SignedRational> = (0..8).map(|k| SignedRational::new(k, 8)).collect();
            let values: Vec<SignedRational> = (0..8).map(|_| random_rational(&mut rng, max_den)).collect();
            let phi = CocycleTable { breaks, values };
            let psi = |x: &SignedRational| (phi.lookup(*x) + alpha).frac();
            let phi_eval = |x: &SignedRational| phi.lookup(*x);
            let samples: Vec<_> = (0..p.uint("rational_points"))
                .map(|_| {
                    (
                        random_rational(&mut rng, max_den),
                        random_rational(&mut rng, max_den),
                        random_rational(&mut rng, max_den),
                    )
                })
                .collect();
            let r = conjugacy_residual(&phi_eval, &psi, alpha, &samples);
            let zero = r == SignedRational::from_integer(0);
            table.push(["rational".into(), samples.len().to_string(), format_rational(&alpha), format_rational(&r), String::new()]);
            out.checks.push(Check::new("exact-residual-zero", zero, format!("residual {}", format_rational(&r))));
            out.summary.insert("residual".into(), format_rational(&r).into());
        }
        Mode::Float => {
            let alpha = p.float("alpha");
            let eps = p.float("perturbation");
            let phi = |x: &f64| 0.3 * (2.0 * PI * x).cos() + 0.2 * (4.0 * PI * x).sin() + 0.5;
            let psi = |x: &f64| phi(x) + alpha;
            let off = |x: &f64| phi(x) + alpha + eps;
            let samples: Vec<(f64, f64, f64)> =
                (0..p.uint("float_points")).map(|_| (rng.gen(), rng.gen(), rng.gen())).collect();
            let r = conjugacy_residual(&phi, &psi, alpha, &samples);
            let c = conjugacy_residual(&phi, &off, alpha, &samples);
            table.push(["float".into(), samples.len().to_string(), alpha.to_string(), r.to_string(), c.to_string()]);
            let tol = p.float("tolerance");
            let need = p.float("control_min");
            out.checks.push(Check::new("float-residual", r <= tol, format!("residual {r:e} (tolerance {tol:e})")));
            out.checks.push(Check::new("perturbed-control", c >= need, format!("control residual {c:e} (need {need:e})")));
            out.summary.insert("residual".into(), num(r));
            out.summary.insert("control_residual".into(), num(c));
        }
    }
    out.table = table;
    Ok(out)
}
