use std::collections::BTreeMap;

use kakutani_core::metrics::{fbar, fbar_bruteforce, fbar_rle};
use kakutani_core::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{parallel_map, Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-fbar-oracle",
    description: "Exact f-bar (DP and run-length kernels) against exhaustive match enumeration",
    modes: &[Mode::Rational],
    params: &[
        ParamSpec {
            name: "exhaustive_max_len",
            kind: ParamKind::Int { min: 1, max: 8 },
            default: "6",
            doc: "all binary word pairs with lengths 1..=this",
        },
        ParamSpec {
            name: "random_pairs",
            kind: ParamKind::Int { min: 0, max: 10_000_000 },
            default: "10000",
            doc: "random pairs over the larger alphabet",
        },
        ParamSpec {
            name: "random_max_len",
            kind: ParamKind::Int { min: 1, max: 12 },
            default: "12",
            doc: "random lengths are uniform in 1..=this",
        },
        ParamSpec {
            name: "random_alphabet",
            kind: ParamKind::Int { min: 2, max: 16 },
            default: "3",
            doc: "alphabet size of the random pairs",
        },
        ParamSpec {
            name: "max_mismatches",
            kind: ParamKind::Int { min: 0, max: 0 },
            default: "0",
            doc: "pass threshold",
        },
    ],
    run,
};

#[derive(Default, Clone, Copy)]
struct Tally {
    pairs: u64,
    dp: u64,
    rle: u64,
    witness: u64,
}

fn compare(a: &Word, b: &Word) -> Result<Tally, ExperimentError> {
    let oracle = fbar_bruteforce(a, b).map_err(ExperimentError::failed)?;
    let (dp, m) = fbar(a, b).map_err(ExperimentError::failed)?;
    let rle = fbar_rle(a, b).map_err(ExperimentError::failed)?;
    Ok(Tally {
        pairs: 1,
        dp: u64::from(dp != oracle),
        rle: u64::from(rle != oracle),
        witness: u64::from(!m.is_valid_for(a, b) || m.len() as u64 != oracle.match_size()),
    })
}

fn binary_words(max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for bits in 0u32..(1 << len) {
            let ids: Vec<u32> = (0..len).map(|i| (bits >> i) & 1).collect();
            out.push(Word::from_ids(&ids));
        }
    }
    out
}

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let words = binary_words(p.uint("exhaustive_max_len") as usize);
    let mut pairs: Vec<(&'static str, Word, Word)> = Vec::new();
    for a in &words {
        for b in &words {
            pairs.push(("exhaustive", a.clone(), b.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let k = p.uint("random_alphabet") as u32;
    let max_len = p.uint("random_max_len") as usize;
    let random_word = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(1..=max_len);
        let ids: Vec<u32> = (0..len).map(|_| rng.gen_range(0..k)).collect();
        Word::from_ids(&ids)
    };
    for _ in 0..p.uint("random_pairs") {
        let a = random_word(&mut rng);
        let b = random_word(&mut rng);
        pairs.push(("random", a, b));
    }

    let chunks: Vec<&[(&str, Word, Word)]> = pairs.chunks(512).collect();
    let results = parallel_map(ctx.jobs, &chunks, |chunk| {
        chunk
            .iter()
            .map(|(set, a, b)| compare(a, b).map(|t| ((*set, a.len(), b.len()), t)))
            .collect::<Result<Vec<_>, _>>()
    });
    let mut groups: BTreeMap<(&str, u64, u64), Tally> = BTreeMap::new();
    for r in results {
        for (key, t) in r? {
            let g = groups.entry(key).or_default();
            g.pairs += t.pairs;
            g.dp += t.dp;
            g.rle += t.rle;
            g.witness += t.witness;
        }
    }

    let mut table = Table::new(&["set", "len_a", "len_b", "pairs", "dp_mismatches", "rle_mismatches", "witness_failures"]);
    let mut total = Tally::default();
    for ((set, la, lb), t) in &groups {
        table.push([set.to_string(), la.to_string(), lb.to_string(), t.pairs.to_string(), t.dp.to_string(), t.rle.to_string(), t.witness.to_string()]);
        total.pairs += t.pairs;
        total.dp += t.dp;
        total.rle += t.rle;
        total.witness += t.witness;
    }
    let limit = p.uint("max_mismatches");
    let mut out = Outcome { table, ..Default::default() };
    out.checks.push(Check::new("dp-equals-oracle", total.dp <= limit, format!("{} mismatches in {} pairs", total.dp, total.pairs)));
    out.checks.push(Check::new("rle-equals-oracle", total.rle <= limit, format!("{} mismatches in {} pairs", total.rle, total.pairs)));
    out.checks.push(Check::new("witness-valid", total.witness <= limit, format!("{} invalid witnesses", total.witness)));
    out.summary.insert("pairs".into(), total.pairs.into());
    out.summary.insert("mismatches".into(), (total.dp + total.rle).into());
    Ok(out)
}
