//! Experiment registry. Each experiment declares its parameters (including
//! its pass thresholds) and returns a result table plus named checks.

mod coding;
mod conjugacy;
mod fbar_oracle;
mod feldman;
mod frequency;
mod gadgets;
mod mixing;
mod tower;

pub use feldman::letter_blocks;
pub use frequency::marker_sequence;
pub use mixing::{sweep as mixing_sweep, test_set as mixing_test_set};
pub use tower::demo_sequence;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Mode, ParamSpec, Params};
use crate::ExperimentError;

pub struct Experiment {
    pub id: &'static str,
    pub description: &'static str,
    /// Supported modes; the first is the default.
    pub modes: &'static [Mode],
    pub params: &'static [ParamSpec],
    pub run: fn(&Context) -> Result<Outcome, ExperimentError>,
}

pub struct Context {
    pub params: Params,
    pub seed: u64,
    pub mode: Mode,
    pub jobs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn to_csv(&self) -> Result<String, ExperimentError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io_like)?;
        for r in &self.rows {
            w.write_record(r).map_err(io_like)?;
        }
        let bytes = w.into_inner().map_err(|e| ExperimentError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn io_like<E: std::fmt::Display>(e: E) -> ExperimentError {
    ExperimentError::Io(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Check { name: name.to_owned(), pass, detail }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub table: Table,
    pub checks: Vec<Check>,
    pub summary: BTreeMap<String, Value>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub modes: Vec<&'static str>,
    pub params: &'static [ParamSpec],
}

static REGISTRY: &[&Experiment] = &[
    &coding::EXPERIMENT,
    &conjugacy::EXPERIMENT,
    &fbar_oracle::EXPERIMENT,
    &feldman::EXPERIMENT,
    &mixing::EXPERIMENT,
    &tower::EXPERIMENT,
    &gadgets::EXPERIMENT,
    &frequency::EXPERIMENT,
];

/// Registered experiments, sorted by id.
pub fn list_experiments() -> Vec<ExperimentInfo> {
    let mut v: Vec<ExperimentInfo> = REGISTRY
        .iter()
        .map(|e| ExperimentInfo {
            id: e.id,
            description: e.description,
            modes: e.modes.iter().map(|m| m.as_str()).collect(),
            params: e.params,
        })
        .collect();
    v.sort_by_key(|e| e.id);
    v
}

pub fn find(id: &str) -> Result<&'static Experiment, ExperimentError> {
    REGISTRY
        .iter()
        .copied()
        .find(|e| e.id == id)
        .ok_or_else(|| ExperimentError::UnknownExperiment(id.to_owned()))
}

/// Validated inputs of a run.
pub fn prepare(config: &ExperimentConfig, jobs: usize) -> Result<(&'static Experiment, Context), ExperimentError> {
    let exp = find(&config.experiment)?;
    let params = Params::resolve(exp.params, &config.params)?;
    let mode = config.mode.unwrap_or(exp.modes[0]);
    if !exp.modes.contains(&mode) {
        return Err(ExperimentError::Schema(format!("{} does not support {} mode", exp.id, mode.as_str())));
    }
    Ok((exp, Context { params, seed: config.seed, mode, jobs: jobs.max(1) }))
}

pub fn run_in_memory(config: &ExperimentConfig, jobs: usize) -> Result<Outcome, ExperimentError> {
    let (exp, ctx) = prepare(config, jobs)?;
    (exp.run)(&ctx)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub pass: bool,
    pub directory: PathBuf,
    pub checks: Vec<Check>,
}

#[derive(Serialize)]
struct Verdict<'a> {
    experiment: &'a str,
    verdict: &'static str,
    checks: &'a [Check],
    summary: &'a BTreeMap<String, Value>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    mode: &'static str,
    seed: u64,
    params: &'a Params,
    input_hash: String,
    outputs: BTreeMap<&'static str, String>,
    tool_version: &'static str,
}

/// Git-style blob hash: SHA-256 over `blob <len>\0<bytes>`.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Runs the experiment and writes `results.csv`, `verdict.json` and
/// `manifest.json` into `config.output` or `root/<id>`.
pub fn run(config: &ExperimentConfig, root: &Path, jobs: usize) -> Result<RunReport, ExperimentError> {
    let (exp, ctx) = prepare(config, jobs)?;
    let outcome = (exp.run)(&ctx)?;
    let dir = config.output.clone().unwrap_or_else(|| root.join(exp.id));
    fs::create_dir_all(&dir).map_err(io_like)?;

    let csv = outcome.table.to_csv()?;
    let verdict = Verdict {
        experiment: exp.id,
        verdict: if outcome.pass() { "PASS" } else { "FAIL" },
        checks: &outcome.checks,
        summary: &outcome.summary,
    };
    let verdict_json = serde_json::to_string_pretty(&verdict).map_err(io_like)? + "\n";
    let echo = serde_json::json!({
        "experiment": exp.id,
        "mode": ctx.mode.as_str(),
        "seed": ctx.seed,
        "params": &ctx.params,
    });
    let input_hash = blob_hash(serde_json::to_string(&echo).map_err(io_like)?.as_bytes());
    let mut outputs = BTreeMap::new();
    outputs.insert("results.csv", blob_hash(csv.as_bytes()));
    outputs.insert("verdict.json", blob_hash(verdict_json.as_bytes()));
    let manifest = Manifest {
        experiment: exp.id,
        mode: ctx.mode.as_str(),
        seed: ctx.seed,
        params: &ctx.params,
        input_hash,
        outputs,
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).map_err(io_like)? + "\n";
    fs::write(dir.join("results.csv"), csv).map_err(io_like)?;
    fs::write(dir.join("verdict.json"), verdict_json).map_err(io_like)?;
    fs::write(dir.join("manifest.json"), manifest_json).map_err(io_like)?;
    Ok(RunReport { experiment: exp.id.to_owned(), pass: outcome.pass(), directory: dir, checks: outcome.checks })
}

/// `f` over `items` on at most `jobs` threads; results keep input order.
pub fn parallel_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = jobs.max(1).min(items.len().max(1));
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("no poisoned slots") = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("no poisoned slots").expect("every item ran")).collect()
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_complete() {
        let ids: Vec<&str> = list_experiments().iter().map(|e| e.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        for id in [
            "exp-fbar-oracle",
            "exp-feldman-separation",
            "exp-coding-separation",
            "exp-conjugacy",
            "exp-mixing-decay",
            "exp-tower-roof",
            "exp-tree-gadgets",
            "exp-ue-frequency",
        ] {
            assert!(ids.contains(&id), "{id}");
        }
        assert!(matches!(find("exp-nope"), Err(ExperimentError::UnknownExperiment(_))));
    }

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u64> = (0..100).collect();
        assert_eq!(parallel_map(4, &items, |x| x * x), items.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn blob_hash_matches_git_style() {
        // `printf 'hello\n' | git hash-object --stdin` under SHA-256 object format.
        assert_eq!(
            blob_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }
}
