//! `(T, N, M)`-Feldman patterns in run-length form.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::words::{LevelPlan, Word};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeldmanError {
    InvalidSpec(String),
    IndexOutOfRange { j: u32, m: u32 },
    InvalidPermutation,
    Overflow,
}

impl fmt::Display for FeldmanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeldmanError::InvalidSpec(why) => write!(f, "invalid Feldman spec: {why}"),
            FeldmanError::IndexOutOfRange { j, m } => write!(f, "pattern index {j} outside 1..={m}"),
            FeldmanError::InvalidPermutation => write!(f, "not a permutation of the block indices"),
            FeldmanError::Overflow => write!(f, "pattern parameters overflow 64-bit counts"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FeldmanError {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeldmanSpec {
    t: u64,
    n: u32,
    m: u32,
    blocks: Vec<Word>,
}

impl FeldmanSpec {
    pub fn new(t: u64, m: u32, blocks: Vec<Word>) -> Result<Self, FeldmanError> {
        let bad = |s: &str| Err(FeldmanError::InvalidSpec(s.into()));
        if t == 0 {
            return bad("T must be positive");
        }
        if m == 0 {
            return bad("M must be at least 1");
        }
        if blocks.len() < 2 {
            return bad("N >= 2 building blocks are required");
        }
        let l = blocks[0].len();
        if l == 0 || blocks.iter().any(|b| b.len() != l) {
            return bad("building blocks must be nonempty and of equal length");
        }
        for (i, a) in blocks.iter().enumerate() {
            if blocks[..i].contains(a) {
                return bad("building blocks must be pairwise distinct");
            }
        }
        let n = blocks.len() as u32;
        Ok(FeldmanSpec { t, n, m, blocks })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn blocks(&self) -> &[Word] {
        &self.blocks
    }

    /// Common block length `L`.
    pub fn block_len(&self) -> u64 {
        self.blocks[0].len()
    }

    /// `T * N^{2j}`: repetitions of each block inside one cycle of `B_j`.
    pub fn repeat(&self, j: u32) -> Result<u64, FeldmanError> {
        (self.n as u64)
            .checked_pow(2 * j)
            .and_then(|p| p.checked_mul(self.t))
            .ok_or(FeldmanError::Overflow)
    }

    /// `N^{2(M+1-j)}`: number of cycles of `B_j`.
    pub fn cycles(&self, j: u32) -> Result<u64, FeldmanError> {
        (self.n as u64)
            .checked_pow(2 * (self.m + 1 - j))
            .ok_or(FeldmanError::Overflow)
    }

    fn check_index(&self, j: u32) -> Result<(), FeldmanError> {
        if j == 0 || j > self.m {
            return Err(FeldmanError::IndexOutOfRange { j, m: self.m });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeldmanPattern {
    pub j: u32,
    pub word: Word,
    pub cycles: u64,
    pub repeat: u64,
    /// One sweep `A_1^{repeat} … A_N^{repeat}`.
    pub cycle: Word,
}

/// `B_j = (A_1^{TN^{2j}} … A_N^{TN^{2j}})^{N^{2(M+1-j)}}`, built on runs.
pub fn generate(spec: &FeldmanSpec, j: u32) -> Result<FeldmanPattern, FeldmanError> {
    spec.check_index(j)?;
    let repeat = spec.repeat(j)?;
    let cycles = spec.cycles(j)?;
    pattern_length_u64(spec)?;
    let cycle = Word::concat(spec.blocks.iter().map(|b| b.repeat(repeat)).collect::<Vec<_>>().iter());
    let word = cycle.repeat(cycles);
    Ok(FeldmanPattern { j, word, cycles, repeat, cycle })
}

/// `T * N^{2M+3} * L` in arbitrary precision.
pub fn pattern_length(spec: &FeldmanSpec) -> BigUint {
    BigUint::from(spec.t) * BigUint::from(spec.n).pow(2 * spec.m + 3) * BigUint::from(spec.block_len())
}

fn pattern_length_u64(spec: &FeldmanSpec) -> Result<u64, FeldmanError> {
    let len = pattern_length(spec);
    u64::try_from(&len).map_err(|_| FeldmanError::Overflow)
}

/// The identical cycles whose concatenation is the pattern.
pub fn decompose_cycles(pattern: &FeldmanPattern) -> Vec<Word> {
    vec![pattern.cycle.clone(); pattern.cycles as usize]
}

fn check_permutation(perm: &[usize], n: usize) -> Result<(), FeldmanError> {
    if perm.len() != n {
        return Err(FeldmanError::InvalidPermutation);
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(FeldmanError::InvalidPermutation);
        }
        seen[p] = true;
    }
    Ok(())
}

fn permuted_cycle(spec: &FeldmanSpec, repeat: u64, perm: &[usize]) -> Word {
    let mut w = Word::empty();
    for &p in perm {
        w.append(&spec.blocks[p].repeat(repeat));
    }
    w
}

/// Rewrites every cycle with the block order `perm` (`perm[i]` is the block
/// placed at slot `i`).
pub fn permute_cycle(spec: &FeldmanSpec, pattern: &FeldmanPattern, perm: &[usize]) -> Result<Word, FeldmanError> {
    check_permutation(perm, spec.n as usize)?;
    Ok(permuted_cycle(spec, pattern.repeat, perm).repeat(pattern.cycles))
}

/// Per-cycle variant: cycle `c` uses `perms[c % perms.len()]`.
pub fn permute_cycles_each(
    spec: &FeldmanSpec,
    pattern: &FeldmanPattern,
    perms: &[Vec<usize>],
) -> Result<Word, FeldmanError> {
    if perms.is_empty() {
        return Err(FeldmanError::InvalidPermutation);
    }
    for p in perms {
        check_permutation(p, spec.n as usize)?;
    }
    let cycles: Vec<Word> = perms.iter().map(|p| permuted_cycle(spec, pattern.repeat, p)).collect();
    let mut w = Word::empty();
    for c in 0..pattern.cycles as usize {
        w.append(&cycles[c % cycles.len()]);
    }
    Ok(w)
}

/// A pattern type: the sequence of pattern indices `(j_1, …, j_u)` whose
/// patterns are concatenated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternType(pub Vec<u32>);

impl PatternType {
    pub fn reversed(&self) -> PatternType {
        PatternType(self.0.iter().rev().copied().collect())
    }

    /// The two supported disjointness cases: the types use disjoint sets of
    /// indices, or one is the reversal of the other (and they differ).
    pub fn disjoint_from(&self, other: &PatternType) -> bool {
        let sets_disjoint = self.0.iter().all(|j| !other.0.contains(j));
        let reversal = *other == self.reversed() && self != other;
        sets_disjoint || reversal
    }
}

/// `B_{j_1} B_{j_2} … B_{j_u}`.
pub fn type_word(spec: &FeldmanSpec, ty: &PatternType) -> Result<Word, FeldmanError> {
    let mut w = Word::empty();
    for &j in &ty.0 {
        w.append(&generate(spec, j)?.word);
    }
    Ok(w)
}

/// A level plan whose new words are the type words of `types`, with the
/// `n_lower` lower-level words as building blocks. Each type uses every
/// lower word `T * N^{2M+2}` times per pattern.
pub fn level_plan(
    n_lower: usize,
    t: u64,
    m: u32,
    types: &[PatternType],
    delta: Rational,
) -> Result<LevelPlan, FeldmanError> {
    if n_lower < 2 {
        return Err(FeldmanError::InvalidSpec("N >= 2 building blocks are required".into()));
    }
    if types.is_empty() || types.iter().any(|ty| ty.0.len() != types[0].0.len() || ty.0.is_empty()) {
        return Err(FeldmanError::InvalidSpec("types must be nonempty and of equal length".into()));
    }
    let n = n_lower as u64;
    let pow = |e: u32| n.checked_pow(e).ok_or(FeldmanError::Overflow);
    let mut words = Vec::with_capacity(types.len());
    for ty in types {
        let mut groups = Vec::new();
        for &j in &ty.0 {
            if j == 0 || j > m {
                return Err(FeldmanError::IndexOutOfRange { j, m });
            }
            let repeat = pow(2 * j)?.checked_mul(t).ok_or(FeldmanError::Overflow)?;
            for _ in 0..pow(2 * (m + 1 - j))? {
                for i in 0..n_lower {
                    groups.push((i, repeat));
                }
            }
        }
        words.push(groups);
    }
    let per_pattern = pow(2 * m + 2)?.checked_mul(t).ok_or(FeldmanError::Overflow)?;
    let f = per_pattern * types[0].0.len() as u64;
    Ok(LevelPlan { f, l: t * n * n, delta, words })
}

/// Checks `T N^{2j'} L = N^{2(j'-j)-1} · T N^{2j} N L` for `j < j'`.
pub fn cycle_span_identity(t: u64, n: u64, l: u64, j: u32, jp: u32) -> bool {
    if j >= jp {
        return false;
    }
    let n = BigUint::from(n);
    let lhs = BigUint::from(t) * n.pow(2 * jp) * BigUint::from(l);
    let rhs = n.pow(2 * (jp - j) - 1) * (BigUint::from(t) * n.pow(2 * j) * &n * BigUint::from(l));
    lhs == rhs && !lhs.is_zero()
}

/// Exact number of occurrences of each block in every pattern:
/// `T * N^{2M+2}`.
pub fn block_occurrences(spec: &FeldmanSpec) -> BigUint {
    BigUint::from(spec.t) * BigUint::from(spec.n).pow(2 * spec.m + 2)
}
