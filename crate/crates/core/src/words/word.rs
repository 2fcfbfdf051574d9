use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Default cap on the number of symbols any path may expand a word into.
pub const DEFAULT_EXPANSION_CAP: u64 = 1 << 22;

/// Symbol identifier. Names live in an [`crate::Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(pub u32);

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A maximal block of one repeated symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub symbol: Symbol,
    pub count: u64,
}

impl Run {
    pub fn new(symbol: Symbol, count: u64) -> Self {
        Run { symbol, count }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionError {
    pub length: u64,
    pub cap: u64,
}

impl fmt::Display for ExpansionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expanding a word of length {} exceeds the expansion cap of {} symbols",
            self.length, self.cap
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExpansionError {}

/// Run-length encoded word in canonical form: every count is positive and
/// adjacent runs carry different symbols. Two words are equal iff they spell
/// the same symbol string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Run>", into = "Vec<Run>")]
pub struct Word {
    runs: Vec<Run>,
    len: u64,
}

impl From<Vec<Run>> for Word {
    fn from(runs: Vec<Run>) -> Self {
        Word::from_runs(runs.into_iter().map(|r| (r.symbol, r.count)))
    }
}

impl From<Word> for Vec<Run> {
    fn from(w: Word) -> Self {
        w.runs
    }
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Builds a canonical word, dropping zero counts and merging neighbours.
    pub fn from_runs<I: IntoIterator<Item = (Symbol, u64)>>(runs: I) -> Self {
        let mut w = Word::empty();
        for (s, c) in runs {
            w.push(s, c);
        }
        w
    }

    pub fn from_symbols(symbols: &[Symbol]) -> Self {
        Word::from_runs(symbols.iter().map(|&s| (s, 1)))
    }

    /// Shorthand for tests and examples: one symbol per `u32`.
    pub fn from_ids(ids: &[u32]) -> Self {
        Word::from_runs(ids.iter().map(|&s| (Symbol(s), 1)))
    }

    pub fn single(symbol: Symbol, count: u64) -> Self {
        Word::from_runs([(symbol, count)])
    }

    /// Appends `count` copies of `symbol`, keeping the encoding canonical.
    pub fn push(&mut self, symbol: Symbol, count: u64) {
        if count == 0 {
            return;
        }
        self.len += count;
        match self.runs.last_mut() {
            Some(last) if last.symbol == symbol => last.count += count,
            _ => self.runs.push(Run { symbol, count }),
        }
    }

    pub fn append(&mut self, other: &Word) {
        for r in &other.runs {
            self.push(r.symbol, r.count);
        }
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a Word>>(parts: I) -> Word {
        let mut w = Word::empty();
        for p in parts {
            w.append(p);
        }
        w
    }

    /// `self` concatenated with itself `times` times.
    pub fn repeat(&self, times: u64) -> Word {
        if times == 0 || self.is_empty() {
            return Word::empty();
        }
        if self.runs.len() == 1 {
            return Word::single(self.runs[0].symbol, self.len * times);
        }
        let mut w = Word::empty();
        w.runs.reserve(self.runs.len() * times as usize);
        for _ in 0..times {
            w.append(self);
        }
        w
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// Expanded length: the sum of run counts.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Lazily iterates over the expanded symbol string.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.runs
            .iter()
            .flat_map(|r| core::iter::repeat_n(r.symbol, r.count as usize))
    }

    /// Materializes the symbol string, refusing anything longer than `cap`.
    pub fn expand(&self, cap: u64) -> Result<Vec<Symbol>, ExpansionError> {
        if self.len > cap {
            return Err(ExpansionError { length: self.len, cap });
        }
        Ok(self.symbols().collect())
    }

    /// Symbol at 0-based position `pos`, `None` past the end. Linear in runs.
    pub fn symbol_at(&self, pos: u64) -> Option<Symbol> {
        let mut start = 0;
        for r in &self.runs {
            if pos < start + r.count {
                return Some(r.symbol);
            }
            start += r.count;
        }
        None
    }

    /// The sub-word `[start, start + len)`, clamped to the word.
    pub fn slice(&self, start: u64, len: u64) -> Word {
        let end = start.saturating_add(len).min(self.len);
        let mut out = Word::empty();
        let mut pos = 0;
        for r in &self.runs {
            let (a, b) = (pos, pos + r.count);
            pos = b;
            if b <= start {
                continue;
            }
            if a >= end {
                break;
            }
            out.push(r.symbol, b.min(end) - a.max(start));
        }
        out
    }

    /// Applies a symbol map to every run.
    pub fn relabel<F: FnMut(Symbol) -> Symbol>(&self, mut f: F) -> Word {
        Word::from_runs(self.runs.iter().map(|r| (f(r.symbol), r.count)))
    }

    pub fn retain<F: FnMut(Symbol) -> bool>(&self, mut keep: F) -> Word {
        Word::from_runs(
            self.runs
                .iter()
                .filter(|r| keep(r.symbol))
                .map(|r| (r.symbol, r.count)),
        )
    }

    /// Distinct symbols in order of first appearance.
    pub fn distinct_symbols(&self) -> Vec<Symbol> {
        let mut seen: Vec<Symbol> = Vec::new();
        for r in &self.runs {
            if !seen.contains(&r.symbol) {
                seen.push(r.symbol);
            }
        }
        seen
    }

    /// Cyclic left rotation by `shift` positions.
    pub fn rotate_left(&self, shift: u64) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let s = shift % self.len;
        let mut w = self.slice(s, self.len - s);
        w.append(&self.slice(0, s));
        w
    }
}

/// Random-access view over a word's runs (prefix offsets, binary search).
#[derive(Debug, Clone)]
pub struct RunIndex<'a> {
    word: &'a Word,
    starts: Vec<u64>,
}

impl<'a> RunIndex<'a> {
    pub fn new(word: &'a Word) -> Self {
        let mut starts = Vec::with_capacity(word.runs.len());
        let mut pos = 0;
        for r in &word.runs {
            starts.push(pos);
            pos += r.count;
        }
        RunIndex { word, starts }
    }

    /// Index of the run containing position `pos`.
    pub fn run_of(&self, pos: u64) -> Option<usize> {
        if pos >= self.word.len {
            return None;
        }
        Some(match self.starts.binary_search(&pos) {
            Ok(i) => i,
            Err(i) => i - 1,
        })
    }

    pub fn symbol_at(&self, pos: u64) -> Option<Symbol> {
        self.run_of(pos).map(|i| self.word.runs[i].symbol)
    }

    pub fn run_start(&self, run: usize) -> u64 {
        self.starts[run]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(i: u32) -> Symbol {
        Symbol(i)
    }

    #[test]
    fn canonical_merging() {
        let w = Word::from_runs([(s(0), 2), (s(0), 3), (s(1), 0), (s(1), 1)]);
        assert_eq!(w.runs(), &[Run::new(s(0), 5), Run::new(s(1), 1)]);
        assert_eq!(w.len(), 6);
    }

    #[test]
    fn repeat_merges_boundaries() {
        let w = Word::from_ids(&[0, 1, 0]);
        let r = w.repeat(3);
        assert_eq!(r.len(), 9);
        assert_eq!(r.run_count(), 7);
        assert_eq!(Word::single(s(2), 4).repeat(5), Word::single(s(2), 20));
    }

    #[test]
    fn expansion_guard() {
        let w = Word::single(s(0), 100);
        assert!(w.expand(99).is_err());
        assert_eq!(w.expand(100).unwrap().len(), 100);
    }

    #[test]
    fn slice_and_index() {
        let w = Word::from_runs([(s(0), 3), (s(1), 2), (s(2), 4)]);
        assert_eq!(w.slice(2, 4), Word::from_runs([(s(0), 1), (s(1), 2), (s(2), 1)]));
        let idx = RunIndex::new(&w);
        for p in 0..w.len() {
            assert_eq!(idx.symbol_at(p), w.symbol_at(p));
        }
        assert_eq!(idx.symbol_at(9), None);
        assert_eq!(w.rotate_left(3).symbol_at(0), Some(s(1)));
    }

    proptest! {
        #[test]
        fn expand_then_recompress_is_identity(runs in prop::collection::vec((0u32..3, 1u64..5), 0..20)) {
            let w = Word::from_runs(runs.into_iter().map(|(a, c)| (Symbol(a), c)));
            let expanded = w.expand(DEFAULT_EXPANSION_CAP).unwrap();
            prop_assert_eq!(Word::from_symbols(&expanded), w.clone());
            for pair in w.runs().windows(2) {
                prop_assert!(pair[0].symbol != pair[1].symbol);
            }
        }
    }
}
