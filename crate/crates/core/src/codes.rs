//! Finite codes of window length `2K + 1` and their stationary application.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::hash::{mix64, Fnv1a};
use crate::words::{Symbol, Word};

/// Largest table [`compose`] or [`FiniteCode::from_fn`] will enumerate.
pub const MAX_TABLE_SIZE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    WordTooShort { length: u64, window: u64 },
    EmptyAlphabet,
    TableTooLarge { size: u128 },
    BadKey { expected: usize, found: usize },
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::WordTooShort { length, window } => {
                write!(f, "word of length {length} is shorter than the code window {window}")
            }
            CodeError::EmptyAlphabet => write!(f, "code alphabets must be nonempty"),
            CodeError::TableTooLarge { size } => write!(f, "code table with {size} entries is too large"),
            CodeError::BadKey { expected, found } => {
                write!(f, "table key of length {found}, expected {expected}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CodeError {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub window: Vec<Symbol>,
    pub output: Symbol,
}

/// A map from `(2K+1)`-tuples to output symbols. Tuples missing from the
/// sparse table map to a value derived from `seed` when one is set (uniform
/// over the output alphabet), and to `default` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeRepr", into = "CodeRepr")]
pub struct FiniteCode {
    radius: u32,
    input: Vec<Symbol>,
    output: Vec<Symbol>,
    table: BTreeMap<Vec<Symbol>, Symbol>,
    default: Symbol,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct CodeRepr {
    radius: u32,
    input: Vec<Symbol>,
    output: Vec<Symbol>,
    #[serde(default)]
    table: Vec<TableEntry>,
    default: Symbol,
    #[serde(default)]
    seed: Option<u64>,
}

impl TryFrom<CodeRepr> for FiniteCode {
    type Error = CodeError;

    fn try_from(r: CodeRepr) -> Result<Self, CodeError> {
        let table = r.table.into_iter().map(|e| (e.window, e.output)).collect();
        FiniteCode::new(r.radius, r.input, r.output, table, r.default, r.seed)
    }
}

impl From<FiniteCode> for CodeRepr {
    fn from(c: FiniteCode) -> Self {
        CodeRepr {
            radius: c.radius,
            input: c.input,
            output: c.output,
            table: c.table.into_iter().map(|(window, output)| TableEntry { window, output }).collect(),
            default: c.default,
            seed: c.seed,
        }
    }
}

impl FiniteCode {
    pub fn new(
        radius: u32,
        input: Vec<Symbol>,
        output: Vec<Symbol>,
        table: BTreeMap<Vec<Symbol>, Symbol>,
        default: Symbol,
        seed: Option<u64>,
    ) -> Result<Self, CodeError> {
        if input.is_empty() || output.is_empty() {
            return Err(CodeError::EmptyAlphabet);
        }
        let width = 2 * radius as usize + 1;
        if let Some(k) = table.keys().find(|k| k.len() != width) {
            return Err(CodeError::BadKey { expected: width, found: k.len() });
        }
        Ok(FiniteCode { radius, input, output, table, default, seed })
    }

    /// Full table of `f` over all input tuples.
    pub fn from_fn<F: FnMut(&[Symbol]) -> Symbol>(
        radius: u32,
        input: Vec<Symbol>,
        output: Vec<Symbol>,
        mut f: F,
    ) -> Result<Self, CodeError> {
        let width = 2 * radius + 1;
        let size = (input.len() as u128).pow(width);
        if size > u128::from(MAX_TABLE_SIZE) {
            return Err(CodeError::TableTooLarge { size });
        }
        let mut table = BTreeMap::new();
        for t in tuples(&input, width as usize) {
            let v = f(&t);
            table.insert(t, v);
        }
        let default = *output.first().ok_or(CodeError::EmptyAlphabet)?;
        FiniteCode::new(radius, input, output, table, default, None)
    }

    /// `K = 0` code mapping every symbol to itself.
    pub fn identity(alphabet: Vec<Symbol>) -> Result<Self, CodeError> {
        FiniteCode::from_fn(0, alphabet.clone(), alphabet, |w| w[0])
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn window(&self) -> u64 {
        2 * u64::from(self.radius) + 1
    }

    pub fn input_alphabet(&self) -> &[Symbol] {
        &self.input
    }

    pub fn output_alphabet(&self) -> &[Symbol] {
        &self.output
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The code on one window of length `2K + 1`.
    pub fn eval(&self, window: &[Symbol]) -> Symbol {
        if let Some(&s) = self.table.get(window) {
            return s;
        }
        match self.seed {
            Some(seed) => {
                let mut h = Fnv1a::new();
                h.write_u64(seed);
                for s in window {
                    h.write_u64(u64::from(s.0));
                }
                let i = mix64(h.finish()) % self.output.len() as u64;
                self.output[i as usize]
            }
            None => self.default,
        }
    }

    fn eval_constant(&self, s: Symbol) -> Symbol {
        self.eval(&vec![s; self.window() as usize])
    }
}

/// Code whose value on every tuple is drawn uniformly from `output` by a
/// fixed hash of `(seed, tuple)`. Nothing is tabulated.
pub fn random_code(radius: u32, input: Vec<Symbol>, output: Vec<Symbol>, seed: u64) -> Result<FiniteCode, CodeError> {
    let default = *output.first().ok_or(CodeError::EmptyAlphabet)?;
    FiniteCode::new(radius, input, output, BTreeMap::new(), default, Some(seed))
}

/// Output position `l` is the code on input window `[l, l + 2K]`; boundary
/// positions are dropped, so the output has length `n - 2K`. Windows inside a
/// single run are evaluated once per run.
pub fn apply_stationary(code: &FiniteCode, w: &Word) -> Result<Word, CodeError> {
    let width = code.window();
    let n = w.len();
    if n < width {
        return Err(CodeError::WordTooShort { length: n, window: width });
    }
    let span = width - 1;
    let end = n - span;
    let runs = w.runs();
    let mut out = Word::empty();
    let mut window: Vec<Symbol> = Vec::with_capacity(width as usize);
    let mut ri = 0usize;
    let mut run_start = 0u64;
    let mut l = 0u64;
    while l < end {
        while run_start + runs[ri].count <= l {
            run_start += runs[ri].count;
            ri += 1;
        }
        let run_end = run_start + runs[ri].count;
        if l + span < run_end {
            let stop = end.min(run_end - span);
            out.push(code.eval_constant(runs[ri].symbol), stop - l);
            l = stop;
            continue;
        }
        window.clear();
        let (mut rj, mut pos) = (ri, l);
        let mut rj_end = run_end;
        while (window.len() as u64) < width {
            if pos >= rj_end {
                rj += 1;
                rj_end += runs[rj].count;
            }
            let take = (rj_end - pos).min(width - window.len() as u64);
            window.extend(core::iter::repeat_n(runs[rj].symbol, take as usize));
            pos += take;
        }
        out.push(code.eval(&window), 1);
        l += 1;
    }
    Ok(out)
}

/// The `(K1 + K2)`-code equal to applying `first` and then `second`.
pub fn compose(first: &FiniteCode, second: &FiniteCode) -> Result<FiniteCode, CodeError> {
    let k1 = first.radius as usize;
    let w2 = second.window() as usize;
    FiniteCode::from_fn(
        first.radius + second.radius,
        first.input.clone(),
        second.output.clone(),
        |t| {
            let mid: Vec<Symbol> = (0..w2).map(|i| first.eval(&t[i..i + 2 * k1 + 1])).collect();
            second.eval(&mid)
        },
    )
}

/// All tuples of length `width` over `alphabet`, lexicographic.
fn tuples(alphabet: &[Symbol], width: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..width {
        out = out
            .into_iter()
            .flat_map(|t| {
                alphabet.iter().map(move |&s| {
                    let mut u = t.clone();
                    u.push(s);
                    u
                })
            })
            .collect();
    }
    out
}
