use std::collections::HashSet;

use kakutani_core::flows::{Roof, RoofFunction};
use kakutani_core::systems::{
    birkhoff_average, build_tower, repetition_cells, u_partition_cell, u_partition_masses, u_system, BaseMap, Rotation,
};
use kakutani_core::words::{ConstructionSequence, LevelPlan};
use kakutani_core::{Alphabet, Rational};

use super::{num, Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::formats::parse_roof;
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-ue-frequency",
    description: "Visit frequencies: golden rotation, repetition markers in a tower, and the four-set partition under U",
    modes: &[Mode::Float],
    params: &[
        ParamSpec { name: "rotation_steps", kind: ParamKind::Int { min: 1, max: 1_000_000_000 }, default: "100000", doc: "rotation orbit length" },
        ParamSpec { name: "rotation_tolerance", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "1e-3", doc: "absolute tolerance around 1/2" },
        ParamSpec { name: "marker_l", kind: ParamKind::Int { min: 1, max: 64 }, default: "8", doc: "repetition length l" },
        ParamSpec { name: "marker_steps", kind: ParamKind::Int { min: 1, max: 1_000_000_000 }, default: "100000", doc: "tower orbit length" },
        ParamSpec { name: "marker_tolerance", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.02", doc: "relative tolerance around 1/l" },
        ParamSpec { name: "u_steps", kind: ParamKind::Int { min: 1, max: 1_000_000_000 }, default: "100000", doc: "orbit length under U" },
        ParamSpec { name: "u_tolerance", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.01", doc: "absolute tolerance per partition cell" },
        ParamSpec { name: "alpha", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.41421356237309503", doc: "first rotation angle of U" },
        ParamSpec { name: "alpha_prime", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.7320508075688772", doc: "second rotation angle of U" },
        ParamSpec { name: "t0", kind: ParamKind::Float { min: 0.0, max: 100.0 }, default: "1.2360679774997898", doc: "fiber circle length of U" },
        ParamSpec { name: "roof", kind: ParamKind::Text, default: "\"cosine:0.25,0.2\"", doc: "fiber rotation amount of U" },
    ],
    run,
};

/// Two letters; level 1 is `{ab, ba}`, level 2 repeats level-1 words in
/// blocks of `l`.
pub fn marker_sequence(l: u64) -> Result<ConstructionSequence, ExperimentError> {
    let zero = Rational::from_integer(0);
    let seq = ConstructionSequence::new(Alphabet::letters(2), false).map_err(ExperimentError::failed)?;
    let first = LevelPlan { f: 1, l: 1, delta: zero, words: vec![vec![(0, 1), (1, 1)], vec![(1, 1), (0, 1)]] };
    let seq = seq.build_next_level(&first).map_err(ExperimentError::failed)?.sequence;
    let second = LevelPlan {
        f: 2 * l,
        l,
        delta: zero,
        words: vec![vec![(0, l), (1, 2 * l), (0, l)], vec![(1, l), (0, l), (1, l), (0, l)]],
    };
    Ok(seq.build_next_level(&second).map_err(ExperimentError::failed)?.sequence)
}

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let mut out = Outcome::default();
    let mut table = Table::new(&["quantity", "steps", "observed", "expected"]);

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let r = Rotation { alpha: golden };
    let steps = p.uint("rotation_steps");
    let freq = birkhoff_average(|x| r.step(x), |&x| x < 0.5, 0.0f64, steps);
    let f = *freq.numer() as f64 / *freq.denom() as f64;
    let tol = p.float("rotation_tolerance");
    table.push(["rotation [0,1/2)".into(), steps.to_string(), f.to_string(), "0.5".into()]);
    out.checks.push(Check::new("rotation", (f - 0.5).abs() <= tol, format!("{f} (tolerance {tol})")));

    let l = p.uint("marker_l");
    let seq = marker_sequence(l)?;
    let tower = build_tower(&seq, 2).map_err(ExperimentError::failed)?;
    let (all, first) = repetition_cells(&seq, 1).map_err(ExperimentError::failed)?;
    let all: HashSet<_> = all.into_iter().collect();
    let first: HashSet<_> = first.into_iter().collect();
    let steps = p.uint("marker_steps");
    let start = tower.bottom_of_plan().expect("plan is nonempty");
    let v = tower.visit_count(start, steps, |c| all.contains(&(c.column, c.level))).map_err(ExperimentError::failed)?;
    let v1 = tower.visit_count(start, steps, |c| first.contains(&(c.column, c.level))).map_err(ExperimentError::failed)?;
    let ratio = v1 as f64 / v.max(1) as f64;
    let expect = 1.0 / l as f64;
    let mt = p.float("marker_tolerance");
    table.push(["marker ratio V1/V".into(), steps.to_string(), ratio.to_string(), expect.to_string()]);
    out.checks.push(Check::new(
        "repetition-marker",
        (ratio - expect).abs() <= mt * expect,
        format!("{v1}/{v} = {ratio} vs 1/{l}"),
    ));

    let roof: RoofFunction = parse_roof(p.text("roof")).map_err(|e| ExperimentError::Schema(e.to_string()))?;
    let t0 = p.float("t0");
    let u = u_system(p.float("alpha"), p.float("alpha_prime"), |x: &(f64, f64)| roof.eval(x.0, x.1), t0);
    let steps = p.uint("u_steps");
    let mut counts = [0u64; 4];
    let mut pt = ((0.0f64, 0.0f64), 0.0f64);
    for _ in 0..steps {
        counts[u_partition_cell(pt.0 .0, pt.0 .1, pt.1, t0)] += 1;
        pt = u.step(&pt);
    }
    let ut = p.float("u_tolerance");
    let mut worst = 0f64;
    for (i, (c, m)) in counts.iter().zip(u_partition_masses()).enumerate() {
        let obs = *c as f64 / steps as f64;
        let exp = *m.numer() as f64 / *m.denom() as f64;
        worst = worst.max((obs - exp).abs());
        table.push([format!("U cell {i}"), steps.to_string(), obs.to_string(), exp.to_string()]);
    }
    out.checks.push(Check::new("u-partition", worst <= ut, format!("largest deviation {worst} (tolerance {ut})")));
    out.summary.insert("rotation_frequency".into(), num(f));
    out.summary.insert("marker_ratio".into(), num(ratio));
    out.summary.insert("u_max_deviation".into(), num(worst));
    out.table = table;
    Ok(out)
}
