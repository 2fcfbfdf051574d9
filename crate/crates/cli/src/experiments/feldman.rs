use kakutani_core::feldman::{cycle_span_identity, generate, pattern_length, FeldmanSpec};
use kakutani_core::metrics::fbar_rle;
use kakutani_core::words::DEFAULT_EXPANSION_CAP;
use kakutani_core::Word;

use super::{num, Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-feldman-separation",
    description: "Feldman pattern lengths, cycle-span identity and pairwise f-bar between patterns",
    modes: &[Mode::Rational],
    params: &[
        ParamSpec { name: "t_values", kind: ParamKind::IntList { min: 1, max: 16 }, default: "[1, 2]", doc: "T sweep" },
        ParamSpec { name: "n_values", kind: ParamKind::IntList { min: 2, max: 8 }, default: "[2, 3]", doc: "N sweep" },
        ParamSpec { name: "m_values", kind: ParamKind::IntList { min: 1, max: 6 }, default: "[1, 2, 3]", doc: "M sweep" },
        ParamSpec { name: "l_values", kind: ParamKind::IntList { min: 1, max: 64 }, default: "[1, 2]", doc: "block length sweep" },
        ParamSpec {
            name: "min_separation",
            kind: ParamKind::Float { min: 0.0, max: 1.0 },
            default: "0.25",
            doc: "pass threshold on f-bar between distinct patterns",
        },
    ],
    run,
};

/// Block `i` is the `i`-th letter repeated `l` times.
pub fn letter_blocks(n: u32, l: u64) -> Vec<Word> {
    (0..n).map(|i| Word::from_runs([(kakutani_core::Symbol(i), l)])).collect()
}

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let min_sep = p.float("min_separation");
    let mut table = Table::new(&["T", "N", "M", "L", "j", "j_prime", "length", "length_ok", "identity_ok", "fbar"]);
    let (mut length_fail, mut identity_fail, mut sep_fail) = (0u64, 0u64, 0u64);
    let mut min_seen = f64::INFINITY;
    let mut configs = 0;
    for &t in &p.ints("t_values") {
        for &n in &p.ints("n_values") {
            for &m in &p.ints("m_values") {
                for &l in &p.ints("l_values") {
                    configs += 1;
                    let (t, n, m, l) = (t as u64, n as u32, m as u32, l as u64);
                    let spec = FeldmanSpec::new(t, m, letter_blocks(n, l)).map_err(ExperimentError::failed)?;
                    let formula = pattern_length(&spec).to_string();
                    let mut patterns = Vec::new();
                    for j in 1..=m {
                        let b = generate(&spec, j).map_err(ExperimentError::failed)?.word;
                        let expanded = b
                            .expand(DEFAULT_EXPANSION_CAP)
                            .map_err(|e| ExperimentError::ExpansionGuard(e.to_string()))?;
                        let ok = expanded.len().to_string() == formula;
                        length_fail += u64::from(!ok);
                        table.push([
                            t.to_string(), n.to_string(), m.to_string(), l.to_string(), j.to_string(),
                            String::new(), formula.clone(), ok.to_string(), String::new(), String::new(),
                        ]);
                        patterns.push(b);
                    }
                    for j in 1..=m {
                        for jp in j + 1..=m {
                            let id = cycle_span_identity(t, n as u64, l, j, jp);
                            identity_fail += u64::from(!id);
                            let f = fbar_rle(&patterns[j as usize - 1], &patterns[jp as usize - 1])
                                .map_err(ExperimentError::failed)?;
                            let v = f.to_f64();
                            min_seen = min_seen.min(v);
                            sep_fail += u64::from(v < min_sep);
                            table.push([
                                t.to_string(), n.to_string(), m.to_string(), l.to_string(), j.to_string(),
                                jp.to_string(), formula.clone(), String::new(), id.to_string(), f.to_string(),
                            ]);
                        }
                    }
                }
            }
        }
    }
    let mut out = Outcome { table, ..Default::default() };
    out.checks.push(Check::new("pattern-length", length_fail == 0, format!("{length_fail} length mismatches")));
    out.checks.push(Check::new("cycle-span-identity", identity_fail == 0, format!("{identity_fail} failures")));
    out.checks.push(Check::new(
        "pattern-separation",
        sep_fail == 0,
        format!("{sep_fail} pairs below {min_sep}; smallest f-bar {min_seen}"),
    ));
    out.summary.insert("configs".into(), configs.into());
    out.summary.insert("min_fbar".into(), num(if min_seen.is_finite() { min_seen } else { 1.0 }));
    Ok(out)
}
