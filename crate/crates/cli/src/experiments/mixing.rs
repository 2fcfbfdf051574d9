use kakutani_core::flows::{batch_seed, mixing_batch, BoxSet, MixingAccumulator, MixingEstimate, RoofFunction, SpecialFlow};

use super::{num, parallel_map, Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::formats::parse_roof;
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-mixing-decay",
    description: "Correlation of A and the time-t preimage of B: constant-roof control against a strongly stretching roof",
    modes: &[Mode::Float],
    params: &[
        ParamSpec {
            name: "t_sweep",
            kind: ParamKind::FloatList { min: 0.0, max: 1e6 },
            default: "[10, 100, 300, 1000, 2000]",
            doc: "flow times",
        },
        ParamSpec { name: "samples", kind: ParamKind::Int { min: 1, max: 100_000_000 }, default: "100000", doc: "Monte-Carlo samples per t" },
        ParamSpec { name: "batch", kind: ParamKind::Int { min: 1, max: 100_000_000 }, default: "10000", doc: "samples per independently seeded batch" },
        ParamSpec { name: "alpha", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.41421356237309503", doc: "first rotation angle" },
        ParamSpec { name: "alpha_prime", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.7320508075688772", doc: "second rotation angle" },
        ParamSpec { name: "control_roof", kind: ParamKind::Text, default: "\"constant:1\"", doc: "roof of the control flow" },
        ParamSpec { name: "strong_roof", kind: ParamKind::Text, default: "\"sawtooth:16\"", doc: "roof of the stretching flow" },
        ParamSpec { name: "control_min", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.05", doc: "control must reach this at some t" },
        ParamSpec { name: "strong_max", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.02", doc: "stretching flow must stay below this at the largest t" },
    ],
    run,
};

/// `A = B = {z < 1/2, s < 1/2}`.
pub fn test_set() -> BoxSet {
    BoxSet { z: (0.0, 0.5), w: (0.0, 1.0), s: (0.0, 0.5) }
}

pub fn sweep(
    flow: &SpecialFlow<f64, RoofFunction>,
    ts: &[f64],
    samples: u64,
    batch: u64,
    seed: u64,
    jobs: usize,
) -> Vec<MixingEstimate> {
    let set = test_set();
    let batches = samples.div_ceil(batch);
    let mut tasks = Vec::new();
    for (ti, &t) in ts.iter().enumerate() {
        for b in 0..batches {
            let count = batch.min(samples - b * batch);
            tasks.push((ti, t, b, count));
        }
    }
    let accs = parallel_map(jobs, &tasks, |&(_, t, b, count)| mixing_batch(flow, &set, &set, t, count, batch_seed(seed, b)));
    let mut merged = vec![MixingAccumulator::default(); ts.len()];
    for (&(ti, ..), acc) in tasks.iter().zip(&accs) {
        merged[ti].merge(acc);
    }
    ts.iter().zip(&merged).map(|(&t, acc)| MixingEstimate::from_accumulator(t, acc)).collect()
}

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let ts = p.floats("t_sweep");
    let (alpha, alpha_prime) = (p.float("alpha"), p.float("alpha_prime"));
    let samples = p.uint("samples");
    let batch = p.uint("batch");
    let mut table = Table::new(&["config", "roof", "t", "estimate", "stderr", "samples"]);
    let mut results = Vec::new();
    for (name, key) in [("control", "control_roof"), ("strong", "strong_roof")] {
        let roof = parse_roof(p.text(key)).map_err(|e| ExperimentError::Schema(e.to_string()))?;
        let flow = SpecialFlow::new(alpha, alpha_prime, roof);
        let est = sweep(&flow, &ts, samples, batch, ctx.seed, ctx.jobs);
        for e in &est {
            table.push([
                name.to_string(),
                p.text(key).to_string(),
                e.t.to_string(),
                e.estimate.to_string(),
                e.stderr.to_string(),
                e.samples.to_string(),
            ]);
        }
        results.push(est);
    }
    let (control, strong) = (&results[0], &results[1]);
    let (ci, cmax) = control
        .iter()
        .enumerate()
        .map(|(i, e)| (i, e.estimate))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let largest = ts.iter().enumerate().fold(0, |a, (i, &t)| if t > ts[a] { i } else { a });
    let s_end = &strong[largest];
    let need = p.float("control_min");
    let cap = p.float("strong_max");
    let mut out = Outcome { table, ..Default::default() };
    out.checks.push(Check::new(
        "control-correlated",
        cmax >= need,
        format!("control peaks at {cmax} (t = {}, stderr {})", control[ci].t, control[ci].stderr),
    ));
    out.checks.push(Check::new(
        "strong-decays",
        s_end.estimate < cap,
        format!("stretching flow at t = {}: {} (stderr {})", s_end.t, s_end.estimate, s_end.stderr),
    ));
    out.checks.push(Check::new(
        "ordering",
        s_end.estimate < cmax,
        format!("{} < {}", s_end.estimate, cmax),
    ));
    out.summary.insert("control_peak".into(), num(cmax));
    out.summary.insert("control_peak_t".into(), num(control[ci].t));
    out.summary.insert("strong_final".into(), num(s_end.estimate));
    out.summary.insert("strong_final_stderr".into(), num(s_end.stderr));
    Ok(out)
}
