//! Experiment configuration: TOML or JSON files, `key=value` overrides and
//! typed parameter schemas.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ExperimentError;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "KAKUTANI_OUTPUT_ROOT";
pub const DEFAULT_OUTPUT_ROOT: &str = "results";
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig {
            experiment: experiment.to_owned(),
            params: BTreeMap::new(),
            seed: DEFAULT_SEED,
            output: None,
            mode: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.to_owned(), value);
        self
    }

    /// Reads `.toml` or `.json` by extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(serde_json::from_str(&text)?),
            _ => Ok(toml::from_str(&text)?),
        }
    }

    /// Applies `key=value`; the value is read as a TOML literal, falling back
    /// to a bare string.
    pub fn set(&mut self, assignment: &str) -> Result<(), ExperimentError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| ExperimentError::Schema(format!("override `{assignment}` is not key=value")))?;
        self.params.insert(key.trim().to_owned(), parse_literal(raw.trim()));
        Ok(())
    }
}

pub fn parse_literal(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .and_then(|v| serde_json::to_value(v).ok())
        .unwrap_or_else(|| Value::String(raw.to_owned()))
}

pub fn output_root(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ParamKind {
    Int { min: i64, max: i64 },
    Float { min: f64, max: f64 },
    IntList { min: i64, max: i64 },
    FloatList { min: f64, max: f64 },
    Text,
    TextList,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    /// TOML literal.
    pub default: &'static str,
    pub doc: &'static str,
}

/// Parameters after defaults and validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params(pub BTreeMap<String, Value>);

impl Params {
    pub fn resolve(schema: &[ParamSpec], given: &BTreeMap<String, Value>) -> Result<Params, ExperimentError> {
        for key in given.keys() {
            if !schema.iter().any(|p| p.name == key) {
                return Err(ExperimentError::Schema(format!("unknown parameter `{key}`")));
            }
        }
        let mut out = BTreeMap::new();
        for spec in schema {
            let v = given.get(spec.name).cloned().unwrap_or_else(|| parse_literal(spec.default));
            check(spec, &v)?;
            out.insert(spec.name.to_owned(), v);
        }
        Ok(Params(out))
    }

    pub fn int(&self, name: &str) -> i64 {
        self.0[name].as_i64().expect("validated")
    }

    pub fn uint(&self, name: &str) -> u64 {
        self.int(name) as u64
    }

    pub fn float(&self, name: &str) -> f64 {
        self.0[name].as_f64().expect("validated")
    }

    pub fn ints(&self, name: &str) -> Vec<i64> {
        self.0[name].as_array().expect("validated").iter().map(|v| v.as_i64().expect("validated")).collect()
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        self.0[name].as_array().expect("validated").iter().map(|v| v.as_f64().expect("validated")).collect()
    }

    pub fn text(&self, name: &str) -> &str {
        self.0[name].as_str().expect("validated")
    }

    pub fn texts(&self, name: &str) -> Vec<String> {
        self.0[name]
            .as_array()
            .expect("validated")
            .iter()
            .map(|v| v.as_str().expect("validated").to_owned())
            .collect()
    }
}

fn check(spec: &ParamSpec, v: &Value) -> Result<(), ExperimentError> {
    let bad = |why: String| Err(ExperimentError::Schema(format!("parameter `{}`: {why}", spec.name)));
    let int_in = |x: &Value, min: i64, max: i64| x.as_i64().is_some_and(|i| (min..=max).contains(&i));
    let float_in = |x: &Value, min: f64, max: f64| x.as_f64().is_some_and(|f| f >= min && f <= max);
    let ok = match spec.kind {
        ParamKind::Int { min, max } => int_in(v, min, max),
        ParamKind::Float { min, max } => float_in(v, min, max),
        ParamKind::IntList { min, max } => {
            v.as_array().is_some_and(|a| !a.is_empty() && a.iter().all(|x| int_in(x, min, max)))
        }
        ParamKind::FloatList { min, max } => {
            v.as_array().is_some_and(|a| !a.is_empty() && a.iter().all(|x| float_in(x, min, max)))
        }
        ParamKind::Text => v.is_string(),
        ParamKind::TextList => v.as_array().is_some_and(|a| !a.is_empty() && a.iter().all(Value::is_string)),
    };
    if ok {
        Ok(())
    } else {
        bad(format!("{v} does not match {:?}", spec.kind))
    }
}
