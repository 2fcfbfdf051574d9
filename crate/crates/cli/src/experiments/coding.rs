use kakutani_core::codes::{apply_stationary, random_code};
use kakutani_core::feldman::{generate, FeldmanSpec};
use kakutani_core::hash::mix64;
use kakutani_core::metrics::fbar_rle;
use kakutani_core::{FbarValue, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::feldman::letter_blocks;
use super::{num, parallel_map, Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-coding-separation",
    description: "Random stationary codes do not bring one Feldman pattern close to another",
    modes: &[Mode::Rational],
    params: &[
        ParamSpec { name: "n", kind: ParamKind::Int { min: 2, max: 26 }, default: "4", doc: "number of building blocks N" },
        ParamSpec { name: "block_len", kind: ParamKind::Int { min: 1, max: 4096 }, default: "64", doc: "block length L" },
        ParamSpec { name: "m", kind: ParamKind::Int { min: 2, max: 6 }, default: "3", doc: "patterns B_1..B_M" },
        ParamSpec { name: "t", kind: ParamKind::Int { min: 1, max: 16 }, default: "1", doc: "T" },
        ParamSpec { name: "codes", kind: ParamKind::Int { min: 1, max: 100_000 }, default: "50", doc: "random codes" },
        ParamSpec { name: "max_radius", kind: ParamKind::Int { min: 0, max: 8 }, default: "4", doc: "radius K is uniform in 0..=this" },
        ParamSpec {
            name: "block_separation",
            kind: ParamKind::Float { min: 0.0, max: 1.0 },
            default: "0.5",
            doc: "required pairwise f-bar between blocks",
        },
        ParamSpec {
            name: "threshold",
            kind: ParamKind::Float { min: 0.0, max: 1.0 },
            default: "0.05",
            doc: "pass threshold on f-bar(code(B_j), B_j')",
        },
    ],
    run,
};

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let n = p.uint("n") as u32;
    let m = p.uint("m") as u32;
    let blocks = letter_blocks(n, p.uint("block_len"));
    let mut block_min = 1.0f64;
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            block_min = block_min.min(fbar_rle(a, b).map_err(ExperimentError::failed)?.to_f64());
        }
    }
    let spec = FeldmanSpec::new(p.uint("t"), m, blocks).map_err(ExperimentError::failed)?;
    let patterns = (1..=m)
        .map(|j| generate(&spec, j).map(|b| b.word))
        .collect::<Result<Vec<_>, _>>()
        .map_err(ExperimentError::failed)?;

    let letters: Vec<Symbol> = (0..n).map(Symbol).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let max_radius = p.uint("max_radius") as u32;
    let codes = (0..p.uint("codes"))
        .map(|i| {
            let radius = rng.gen_range(0..=max_radius);
            random_code(radius, letters.clone(), letters.clone(), mix64(ctx.seed ^ mix64(i)))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(ExperimentError::failed)?;

    let mut tasks = Vec::new();
    for (ci, _) in codes.iter().enumerate() {
        for j in 0..m as usize {
            for jp in 0..m as usize {
                if j != jp {
                    tasks.push((ci, j, jp));
                }
            }
        }
    }
    let coded: Vec<Vec<_>> = parallel_map(ctx.jobs, &codes, |c| {
        patterns.iter().map(|b| apply_stationary(c, b)).collect::<Result<Vec<_>, _>>()
    })
    .into_iter()
    .collect::<Result<_, _>>()
    .map_err(ExperimentError::failed)?;
    let values: Vec<Result<FbarValue, _>> =
        parallel_map(ctx.jobs, &tasks, |&(ci, j, jp)| fbar_rle(&coded[ci][j], &patterns[jp]));

    let threshold = p.float("threshold");
    let mut table = Table::new(&["code", "radius", "j", "j_prime", "coded_runs", "fbar", "fbar_value"]);
    let mut violations = 0u64;
    let mut min_seen = f64::INFINITY;
    for (&(ci, j, jp), v) in tasks.iter().zip(values) {
        let v = v.map_err(ExperimentError::failed)?;
        let x = v.to_f64();
        min_seen = min_seen.min(x);
        violations += u64::from(x < threshold);
        table.push([
            ci.to_string(),
            codes[ci].radius().to_string(),
            (j + 1).to_string(),
            (jp + 1).to_string(),
            coded[ci][j].run_count().to_string(),
            v.to_string(),
            x.to_string(),
        ]);
    }
    let mut out = Outcome { table, ..Default::default() };
    let need = p.float("block_separation");
    out.checks.push(Check::new("block-separation", block_min >= need, format!("smallest block f-bar {block_min} (need {need})")));
    out.checks.push(Check::new(
        "coded-separation",
        violations == 0,
        format!("{violations} of {} coded pairs below {threshold}; smallest {min_seen}", tasks.len()),
    ));
    out.summary.insert("pairs".into(), tasks.len().into());
    out.summary.insert("violations".into(), violations.into());
    out.summary.insert("min_fbar".into(), num(min_seen));
    out.summary.insert("threshold".into(), num(threshold));
    Ok(out)
}
