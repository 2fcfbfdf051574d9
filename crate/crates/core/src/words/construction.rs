use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::alphabet::Alphabet;
use super::word::{Run, Symbol, Word};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    /// An upper word is not a concatenation of lower words (plus new spacers).
    NonDecomposable { word: usize, position: u64 },
    MissingParameters { level: usize },
    PlanInfeasible(String),
    InvalidSequence(String),
}

impl fmt::Display for ConstructionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionError::NonDecomposable { word, position } => write!(
                f,
                "upper word {word} is not a concatenation of lower words (stuck at position {position})"
            ),
            ConstructionError::MissingParameters { level } => {
                write!(f, "level {level} has no passage parameters (f, k, l, delta)")
            }
            ConstructionError::PlanInfeasible(why) => write!(f, "plan infeasible: {why}"),
            ConstructionError::InvalidSequence(why) => write!(f, "invalid construction sequence: {why}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConstructionError {}

/// Parameters of the passage from level `n` to level `n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelParams {
    /// Occurrences of each `n`-word inside every `(n+1)`-word.
    pub f: u64,
    /// Number of `n`-words concatenated into an `(n+1)`-word; `k = f * |W_n|`.
    pub k: u64,
    /// Repetition unit: every maximal run of one `n`-word has a length divisible by `l`.
    pub l: u64,
    /// Proportion of newly added spacers relative to `k * h`; zero without spacers.
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionLevel {
    pub index: usize,
    pub words: Vec<Word>,
    pub h: u64,
    /// Set once the next level has been built from this one.
    pub params: Option<LevelParams>,
}

impl ConstructionLevel {
    pub fn new(index: usize, words: Vec<Word>, h: u64) -> Self {
        ConstructionLevel { index, words, h, params: None }
    }

    pub fn with_params(mut self, f: u64, k: u64, l: u64) -> Self {
        self.params = Some(LevelParams { f, k, l, delta: Rational::zero() });
        self
    }

    fn params(&self) -> Result<&LevelParams, ConstructionError> {
        self.params
            .as_ref()
            .ok_or(ConstructionError::MissingParameters { level: self.index })
    }
}

/// One piece of an upper word read against the lower level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Word(usize),
    /// Spacers added at this level, outside every lower word.
    Spacers(u64),
}

/// All words of a level have expanded length `h`.
pub fn check_a1(level: &ConstructionLevel) -> bool {
    level.words.iter().all(|w| w.len() == level.h)
}

/// Every upper word is `k` lower words and each lower word occurs exactly `f`
/// times in it.
pub fn check_a2(
    lower: &ConstructionLevel,
    upper: &ConstructionLevel,
    spacers: Option<(Symbol, Symbol)>,
) -> Result<bool, ConstructionError> {
    let p = lower.params()?;
    for seq in word_sequences(lower, upper, spacers)? {
        if seq.len() as u64 != p.k {
            return Ok(false);
        }
        let mut counts = vec![0u64; lower.words.len()];
        for &i in &seq {
            counts[i] += 1;
        }
        if counts.iter().any(|&c| c != p.f) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Unique readability: for upper words `w`, `w'` (possibly equal) with
/// lower-word sequences of length `K`, no block `w[i+1..=i+k]` with
/// `k >= max(1, K/2)` and `1 <= i <= K - k` equals the prefix `w'[1..=k]`.
pub fn check_a3(
    lower: &ConstructionLevel,
    upper: &ConstructionLevel,
    spacers: Option<(Symbol, Symbol)>,
) -> Result<bool, ConstructionError> {
    let seqs = word_sequences(lower, upper, spacers)?;
    Ok(sequences_uniquely_readable(&seqs))
}

pub(crate) fn sequences_uniquely_readable(seqs: &[Vec<usize>]) -> bool {
    for w in seqs {
        for wp in seqs {
            if w.len() != wp.len() {
                return false;
            }
            let big_k = w.len();
            let min_block = (big_k / 2).max(1);
            if min_block >= big_k {
                continue;
            }
            // z[j] = longest common prefix of w[j..] and wp.
            let z = prefix_matches(wp, w);
            if (1..=big_k - min_block).any(|i| z[i] >= min_block) {
                return false;
            }
        }
    }
    true
}

/// For each offset `j` of `text`, the length of the longest common prefix of
/// `text[j..]` and `pattern` (Z-algorithm over `pattern # text`).
fn prefix_matches(pattern: &[usize], text: &[usize]) -> Vec<usize> {
    let sentinel = usize::MAX;
    let mut s: Vec<usize> = Vec::with_capacity(pattern.len() + text.len() + 1);
    s.extend_from_slice(pattern);
    s.push(sentinel);
    s.extend_from_slice(text);
    let n = s.len();
    let mut z = vec![0usize; n];
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] && s[i + z[i]] != sentinel {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z[pattern.len() + 1..].to_vec()
}

/// Every maximal run of one lower word (not interrupted by new spacers) has a
/// length that is a positive multiple of `l`.
pub fn check_a4(
    lower: &ConstructionLevel,
    upper: &ConstructionLevel,
    spacers: Option<(Symbol, Symbol)>,
) -> Result<bool, ConstructionError> {
    let l = lower.params()?.l;
    if l == 0 {
        return Ok(false);
    }
    for (wi, w) in upper.words.iter().enumerate() {
        let pieces = decompose(lower, w, spacers).map_err(|pos| ConstructionError::NonDecomposable {
            word: wi,
            position: pos,
        })?;
        let mut current: Option<(usize, u64)> = None;
        for p in pieces.iter().copied().chain(core::iter::once(Piece::Spacers(0))) {
            match (p, current) {
                (Piece::Word(i), Some((j, c))) if i == j => current = Some((j, c + 1)),
                (p, cur) => {
                    if let Some((_, c)) = cur {
                        if c % l != 0 {
                            return Ok(false);
                        }
                    }
                    current = match p {
                        Piece::Word(i) => Some((i, 1)),
                        Piece::Spacers(_) => None,
                    };
                }
            }
        }
    }
    Ok(true)
}

/// Lower-word index sequences of every upper word, new spacers dropped.
pub fn word_sequences(
    lower: &ConstructionLevel,
    upper: &ConstructionLevel,
    spacers: Option<(Symbol, Symbol)>,
) -> Result<Vec<Vec<usize>>, ConstructionError> {
    upper
        .words
        .iter()
        .enumerate()
        .map(|(wi, w)| {
            decompose(lower, w, spacers)
                .map(|pieces| {
                    pieces
                        .into_iter()
                        .filter_map(|p| match p {
                            Piece::Word(i) => Some(i),
                            Piece::Spacers(_) => None,
                        })
                        .collect()
                })
                .map_err(|pos| ConstructionError::NonDecomposable { word: wi, position: pos })
        })
        .collect()
}

/// Reads `word` as lower words separated by runs of newly added spacers.
/// Works on runs; nothing is expanded. On failure returns the stuck position.
pub fn decompose(
    lower: &ConstructionLevel,
    word: &Word,
    spacers: Option<(Symbol, Symbol)>,
) -> Result<Vec<Piece>, u64> {
    let runs = word.runs();
    let is_spacer = |s: Symbol| matches!(spacers, Some((b, e)) if s == b || s == e);
    let mut pieces = Vec::new();
    let mut cur = Cursor { run: 0, offset: 0, pos: 0 };
    while cur.run < runs.len() {
        if let Some((i, next)) = match_any(lower, runs, cur) {
            pieces.push(Piece::Word(i));
            cur = next;
            continue;
        }
        let r = runs[cur.run];
        if !is_spacer(r.symbol) {
            return Err(cur.pos);
        }
        // A lower word may itself begin with a spacer run of this symbol; the
        // only admissible start inside this run leaves exactly that run behind.
        let remaining = r.count - cur.offset;
        let mut consumed = remaining;
        for w in &lower.words {
            let wr = w.runs();
            if wr.len() >= 2 && wr[0].symbol == r.symbol && wr[0].count < remaining {
                let skip = remaining - wr[0].count;
                let probe = cur.advance_within(skip);
                if match_word(wr, runs, probe).is_some() {
                    consumed = consumed.min(skip);
                }
            }
        }
        match pieces.last_mut() {
            Some(Piece::Spacers(c)) => *c += consumed,
            _ => pieces.push(Piece::Spacers(consumed)),
        }
        cur = cur.advance(runs, consumed);
    }
    Ok(pieces)
}

#[derive(Debug, Clone, Copy)]
struct Cursor {
    run: usize,
    offset: u64,
    pos: u64,
}

impl Cursor {
    fn advance_within(self, by: u64) -> Cursor {
        Cursor { run: self.run, offset: self.offset + by, pos: self.pos + by }
    }

    fn advance(mut self, runs: &[Run], mut by: u64) -> Cursor {
        self.pos += by;
        while by > 0 {
            let left = runs[self.run].count - self.offset;
            if by < left {
                self.offset += by;
                return self;
            }
            by -= left;
            self.run += 1;
            self.offset = 0;
        }
        self
    }
}

fn match_any(lower: &ConstructionLevel, runs: &[Run], cur: Cursor) -> Option<(usize, Cursor)> {
    lower
        .words
        .iter()
        .enumerate()
        .find_map(|(i, w)| match_word(w.runs(), runs, cur).map(|c| (i, c)))
}

/// Matches the run sequence `pat` at the cursor; returns the cursor after it.
fn match_word(pat: &[Run], runs: &[Run], cur: Cursor) -> Option<Cursor> {
    if pat.is_empty() {
        return None;
    }
    let t = pat.len();
    let mut offset = cur.offset;
    let mut pos = cur.pos;
    for (run, (idx, p)) in (cur.run..).zip(pat.iter().enumerate()) {
        let r = runs.get(run)?;
        if r.symbol != p.symbol {
            return None;
        }
        let left = r.count - offset;
        let last = idx + 1 == t;
        if idx > 0 && offset != 0 {
            return None;
        }
        if last {
            if left < p.count {
                return None;
            }
            pos += p.count;
            if left == p.count {
                return Some(Cursor { run: run + 1, offset: 0, pos });
            }
            return Some(Cursor { run, offset: offset + p.count, pos });
        }
        if left != p.count {
            return None;
        }
        pos += p.count;
        offset = 0;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSequence {
    pub alphabet: Alphabet,
    pub levels: Vec<ConstructionLevel>,
    /// Circular variant: spacers are added between repetition groups.
    pub circular: bool,
}

/// Instructions for one new level: each new word is a list of
/// `(lower word index, repetition count)` groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPlan {
    pub f: u64,
    pub l: u64,
    pub delta: Rational,
    pub words: Vec<Vec<(usize, u64)>>,
}

#[derive(Debug, Clone)]
pub struct NextLevel {
    pub sequence: ConstructionSequence,
    /// Result of the unique-readability check on the new level.
    pub uniquely_readable: bool,
}

impl ConstructionSequence {
    /// Level 0: one single-symbol word per non-spacer symbol.
    pub fn new(alphabet: Alphabet, circular: bool) -> Result<Self, ConstructionError> {
        if circular && alphabet.spacers().is_none() {
            return Err(ConstructionError::InvalidSequence(
                "the circular variant needs declared spacers".into(),
            ));
        }
        let words: Vec<Word> = alphabet.letters_only().into_iter().map(|s| Word::single(s, 1)).collect();
        if words.is_empty() {
            return Err(ConstructionError::InvalidSequence("empty alphabet".into()));
        }
        Ok(ConstructionSequence {
            alphabet,
            levels: vec![ConstructionLevel::new(0, words, 1)],
            circular,
        })
    }

    pub fn spacers(&self) -> Option<(Symbol, Symbol)> {
        if self.circular {
            self.alphabet.spacers()
        } else {
            None
        }
    }

    pub fn top(&self) -> &ConstructionLevel {
        self.levels.last().expect("a sequence always has level 0")
    }

    pub fn level(&self, n: usize) -> Option<&ConstructionLevel> {
        self.levels.get(n)
    }

    /// Checks the structural invariants of every level and passage.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |s: String| Err(ConstructionError::InvalidSequence(s));
        let first = &self.levels[0];
        if first.h != 1 || first.words.iter().any(|w| w.run_count() != 1 || w.len() != 1) {
            return bad("level 0 words must be single symbols".into());
        }
        for (n, level) in self.levels.iter().enumerate() {
            if level.index != n {
                return bad(alloc::format!("level {n} carries index {}", level.index));
            }
            if !check_a1(level) {
                return bad(alloc::format!("level {n} words have unequal lengths"));
            }
            if n + 1 == self.levels.len() {
                break;
            }
            let p = level.params()?;
            if p.k != p.f * level.words.len() as u64 {
                return bad(alloc::format!("level {n}: k != f * |W|"));
            }
            if p.delta >= Rational::one() || (!self.circular && !p.delta.is_zero()) {
                return bad(alloc::format!("level {n}: delta out of range"));
            }
            let expected = Rational::from_integer(p.k * level.h) * (Rational::one() + p.delta);
            if Rational::from_integer(self.levels[n + 1].h) != expected {
                return bad(alloc::format!("level {}: unexpected word length", n + 1));
            }
        }
        Ok(())
    }

    /// Appends a level built from `plan`. (A1), (A2) and (A4) hold by
    /// construction; (A3) is evaluated and reported.
    pub fn build_next_level(&self, plan: &LevelPlan) -> Result<NextLevel, ConstructionError> {
        let infeasible = |s: String| Err(ConstructionError::PlanInfeasible(s));
        let lower = self.top();
        let nwords = lower.words.len();
        if plan.words.is_empty() {
            return infeasible("no words planned".into());
        }
        if plan.f == 0 || plan.l == 0 {
            return infeasible("f and l must be positive".into());
        }
        let k = plan.f * nwords as u64;
        for (wi, groups) in plan.words.iter().enumerate() {
            let mut per_index = vec![0u64; nwords];
            for &(i, c) in groups {
                if i >= nwords {
                    return infeasible(alloc::format!("word {wi}: lower index {i} out of range"));
                }
                if c == 0 || c % plan.l != 0 {
                    return infeasible(alloc::format!(
                        "word {wi}: repetition {c} is not a positive multiple of l = {}",
                        plan.l
                    ));
                }
                per_index[i] += c;
            }
            if per_index.iter().any(|&c| c != plan.f) {
                return infeasible(alloc::format!(
                    "word {wi}: every lower word must occur exactly f = {} times",
                    plan.f
                ));
            }
        }
        let spacer_total = if self.circular {
            if plan.delta < Rational::zero() || plan.delta >= Rational::one() {
                return infeasible("delta must lie in [0, 1)".into());
            }
            let s = plan.delta * Rational::from_integer(k * lower.h);
            if !s.is_integer() {
                return infeasible(alloc::format!("delta * k * h = {s} is not an integer"));
            }
            s.to_integer()
        } else {
            if !plan.delta.is_zero() {
                return infeasible("delta must be zero without spacers".into());
            }
            0
        };
        let (b, e) = self.spacers().unwrap_or((Symbol(0), Symbol(0)));

        let mut words = Vec::with_capacity(plan.words.len());
        for groups in &plan.words {
            let g = groups.len() as u64;
            let mut w = Word::empty();
            for (gi, &(i, c)) in groups.iter().enumerate() {
                if spacer_total > 0 {
                    let share = spacer_total / g + u64::from((gi as u64) < spacer_total % g);
                    w.push(if gi % 2 == 0 { b } else { e }, share);
                }
                w.append(&lower.words[i].repeat(c));
            }
            if words.contains(&w) {
                return infeasible("plan produces the same word twice".into());
            }
            words.push(w);
        }

        let mut sequence = self.clone();
        let n = sequence.levels.len() - 1;
        sequence.levels[n].params = Some(LevelParams { f: plan.f, k, l: plan.l, delta: plan.delta });
        let h = k * lower.h + spacer_total;
        sequence.levels.push(ConstructionLevel::new(n + 1, words, h));
        let spacers = sequence.spacers();
        let uniquely_readable = check_a3(&sequence.levels[n], &sequence.levels[n + 1], spacers)?;
        Ok(NextLevel { sequence, uniquely_readable })
    }

    /// Total spacer symbols added when passing from level `n` to `n + 1`,
    /// per upper word.
    pub fn new_spacers(&self, n: usize) -> Option<u64> {
        let p = self.levels.get(n)?.params.as_ref()?;
        (p.delta * Rational::from_integer(p.k * self.levels[n].h)).to_integer().to_u64()
    }
}
