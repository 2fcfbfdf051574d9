//! Hamming distance `d̄` and the match metric `f̄ = 1 - 2r/(n+m)`, where `r`
//! is the size of a largest match (a longest common subsequence).

pub mod lcs;
pub mod rle;

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::words::{ExpansionError, Symbol, Word, DEFAULT_EXPANSION_CAP};
use crate::Rational;

/// Input-size guard of the brute-force oracle.
pub const ORACLE_MAX_LEN: u64 = 12;

/// Largest expanded product `n * m / 64` the plain bit-parallel path accepts.
const PLAIN_WORK_CAP: u64 = 1 << 34;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    LengthMismatch { left: u64, right: u64 },
    EmptyInput,
    OracleSizeExceeded { length: u64, limit: u64 },
    Expansion(ExpansionError),
    /// Neither the run kernel nor the plain kernel can handle the input.
    TooLarge { runs: (usize, usize), lengths: (u64, u64) },
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::LengthMismatch { left, right } => {
                write!(f, "words have different lengths ({left} and {right})")
            }
            MetricError::EmptyInput => write!(f, "f-bar needs at least one nonempty word"),
            MetricError::OracleSizeExceeded { length, limit } => {
                write!(f, "brute-force oracle limited to length {limit}, got {length}")
            }
            MetricError::Expansion(e) => write!(f, "{e}"),
            MetricError::TooLarge { runs, lengths } => write!(
                f,
                "inputs too large for exact f-bar ({} x {} runs, lengths {} x {})",
                runs.0, runs.1, lengths.0, lengths.1
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricError {}

impl From<ExpansionError> for MetricError {
    fn from(e: ExpansionError) -> Self {
        MetricError::Expansion(e)
    }
}

/// `f̄` kept as the unreduced fraction `(n + m - 2r) / (n + m)`. Equality and
/// ordering compare the rational values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FbarValue {
    numerator: u64,
    denominator: u64,
}

impl FbarValue {
    /// Value for words of lengths `n`, `m` with largest match size `r`.
    pub fn from_match_size(n: u64, m: u64, r: u64) -> Self {
        assert!(r <= n.min(m), "match larger than a word");
        assert!(n + m > 0, "f-bar of two empty words");
        FbarValue { numerator: n + m - 2 * r, denominator: n + m }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn match_size(&self) -> u64 {
        (self.denominator - self.numerator) / 2
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.numerator, self.denominator)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl PartialEq for FbarValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FbarValue {}

impl PartialOrd for FbarValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FbarValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = u128::from(self.numerator) * u128::from(other.denominator);
        let r = u128::from(other.numerator) * u128::from(self.denominator);
        l.cmp(&r)
    }
}

impl fmt::Display for FbarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A match: 1-based index pairs, strictly increasing in both coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub pairs: Vec<(u64, u64)>,
}

impl Match {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks monotonicity, index ranges and symbol equality against `a`, `b`.
    pub fn is_valid_for(&self, a: &Word, b: &Word) -> bool {
        let monotone = self.pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        monotone
            && self.pairs.iter().all(|&(i, j)| {
                i >= 1
                    && j >= 1
                    && i <= a.len()
                    && j <= b.len()
                    && a.symbol_at(i - 1) == b.symbol_at(j - 1)
            })
    }
}

/// Fraction of positions where equal-length words differ, merged run by run.
pub fn hamming(a: &Word, b: &Word) -> Result<Rational, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Ok(Rational::from_integer(0));
    }
    let (ra, rb) = (a.runs(), b.runs());
    let (mut i, mut j) = (0, 0);
    let (mut left_a, mut left_b) = (ra[0].count, rb[0].count);
    let mut differ = 0u64;
    while i < ra.len() && j < rb.len() {
        let step = left_a.min(left_b);
        if ra[i].symbol != rb[j].symbol {
            differ += step;
        }
        left_a -= step;
        left_b -= step;
        if left_a == 0 {
            i += 1;
            if i < ra.len() {
                left_a = ra[i].count;
            }
        }
        if left_b == 0 {
            j += 1;
            if j < rb.len() {
                left_b = rb[j].count;
            }
        }
    }
    Ok(Rational::new(differ, a.len()))
}

fn check_nonempty(a: &Word, b: &Word) -> Result<(), MetricError> {
    if a.is_empty() && b.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(())
}

/// `f̄` with a witness of maximal size, expanding both words under the
/// default expansion cap.
pub fn fbar(a: &Word, b: &Word) -> Result<(FbarValue, Match), MetricError> {
    fbar_with_cap(a, b, DEFAULT_EXPANSION_CAP)
}

pub fn fbar_with_cap(a: &Word, b: &Word, cap: u64) -> Result<(FbarValue, Match), MetricError> {
    check_nonempty(a, b)?;
    let x = a.expand(cap)?;
    let y = b.expand(cap)?;
    let pairs: Vec<(u64, u64)> = lcs::lcs_witness(&x, &y)
        .into_iter()
        .map(|(i, j)| (i as u64 + 1, j as u64 + 1))
        .collect();
    let r = pairs.len() as u64;
    Ok((FbarValue::from_match_size(a.len(), b.len(), r), Match { pairs }))
}

/// `f̄` value only. Uses the run-corner kernel when the run grid is cheaper
/// than the bit-parallel pass over the expanded words, and the bit-parallel
/// pass otherwise.
pub fn fbar_rle(a: &Word, b: &Word) -> Result<FbarValue, MetricError> {
    check_nonempty(a, b)?;
    Ok(FbarValue::from_match_size(a.len(), b.len(), lcs_words(a, b)?))
}

/// LCS length of two words, choosing the cheaper exact kernel.
pub fn lcs_words(a: &Word, b: &Word) -> Result<u64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Ok(0);
    }
    let grid = rle::grid_cells(a.runs(), b.runs());
    let plain = u64::try_from(u128::from(a.len()) * u128::from(b.len()) / 64).unwrap_or(u64::MAX);
    if grid <= plain.max(1) || plain > PLAIN_WORK_CAP {
        if let Some(r) = rle::rle_lcs(a.runs(), b.runs()) {
            return Ok(r);
        }
    }
    if plain <= PLAIN_WORK_CAP {
        let x: Vec<Symbol> = a.symbols().collect();
        let y: Vec<Symbol> = b.symbols().collect();
        return Ok(lcs::lcs_length(&x, &y) as u64);
    }
    Err(MetricError::TooLarge { runs: (a.run_count(), b.run_count()), lengths: (a.len(), b.len()) })
}

/// Exhaustive search over all matches (with an upper-bound cut that never
/// discards a better match). Both words must have length at most
/// [`ORACLE_MAX_LEN`].
pub fn fbar_bruteforce(a: &Word, b: &Word) -> Result<FbarValue, MetricError> {
    check_nonempty(a, b)?;
    for w in [a, b] {
        if w.len() > ORACLE_MAX_LEN {
            return Err(MetricError::OracleSizeExceeded { length: w.len(), limit: ORACLE_MAX_LEN });
        }
    }
    let x: Vec<Symbol> = a.symbols().collect();
    let y: Vec<Symbol> = b.symbols().collect();
    let mut best = 0usize;
    extend_match(&x, &y, 0, 0, 0, &mut best);
    Ok(FbarValue::from_match_size(a.len(), b.len(), best as u64))
}

/// Tries every extension of a match whose last pair is `(i - 1, j - 1)`.
fn extend_match(x: &[Symbol], y: &[Symbol], i: usize, j: usize, size: usize, best: &mut usize) {
    if size > *best {
        *best = size;
    }
    if size + (x.len() - i).min(y.len() - j) <= *best {
        return;
    }
    for ii in i..x.len() {
        for jj in j..y.len() {
            if x[ii] == y[jj] {
                extend_match(x, y, ii + 1, jj + 1, size + 1, best);
            }
        }
    }
}

/// Two equal-length words read as one word over pairs of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleWord {
    primary: Word,
    secondary: Word,
}

impl DoubleWord {
    pub fn new(primary: Word, secondary: Word) -> Result<Self, MetricError> {
        if primary.len() != secondary.len() {
            return Err(MetricError::LengthMismatch { left: primary.len(), right: secondary.len() });
        }
        Ok(DoubleWord { primary, secondary })
    }

    pub fn primary(&self) -> &Word {
        &self.primary
    }

    pub fn secondary(&self) -> &Word {
        &self.secondary
    }

    pub fn len(&self) -> u64 {
        self.primary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primary.is_empty()
    }

    /// Maximal blocks of a constant symbol pair.
    pub fn pair_runs(&self) -> Vec<((Symbol, Symbol), u64)> {
        let (ra, rb) = (self.primary.runs(), self.secondary.runs());
        let mut out: Vec<((Symbol, Symbol), u64)> = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (mut left_a, mut left_b) = match (ra.first(), rb.first()) {
            (Some(x), Some(y)) => (x.count, y.count),
            _ => return out,
        };
        while i < ra.len() && j < rb.len() {
            let step = left_a.min(left_b);
            out.push(((ra[i].symbol, rb[j].symbol), step));
            left_a -= step;
            left_b -= step;
            if left_a == 0 {
                i += 1;
                left_a = ra.get(i).map_or(0, |r| r.count);
            }
            if left_b == 0 {
                j += 1;
                left_b = rb.get(j).map_or(0, |r| r.count);
            }
        }
        out
    }

    pub fn pairs(&self) -> Vec<(Symbol, Symbol)> {
        self.primary.symbols().zip(self.secondary.symbols()).collect()
    }
}

/// `f̄` over the paired alphabet: positions match only when both
/// coordinates agree.
pub fn fbar_double(x: &DoubleWord, y: &DoubleWord) -> Result<FbarValue, MetricError> {
    if x.is_empty() && y.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    for d in [x, y] {
        if d.len() > DEFAULT_EXPANSION_CAP {
            return Err(ExpansionError { length: d.len(), cap: DEFAULT_EXPANSION_CAP }.into());
        }
    }
    let r = lcs::lcs_length(&x.pairs(), &y.pairs()) as u64;
    Ok(FbarValue::from_match_size(x.len(), y.len(), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::from_symbols(&s.bytes().map(|c| Symbol(u32::from(c - b'a'))).collect::<Vec<_>>())
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&w("abc"), &w("abd")), Ok(Rational::new(1, 3)));
        assert_eq!(hamming(&w("abab"), &w("abab")), Ok(Rational::from_integer(0)));
        assert_eq!(hamming(&w("aaa"), &w("bbb")), Ok(Rational::from_integer(1)));
        assert!(matches!(hamming(&w("a"), &w("ab")), Err(MetricError::LengthMismatch { .. })));
    }

    #[test]
    fn fbar_examples() {
        let (v, m) = fbar(&w("ab"), &w("ab")).unwrap();
        assert_eq!(v.value(), Rational::from_integer(0));
        assert_eq!(m.pairs, vec![(1, 1), (2, 2)]);
        let (v, m) = fbar(&w("aaa"), &w("bbb")).unwrap();
        assert_eq!(v.value(), Rational::from_integer(1));
        assert!(m.is_empty());
        let (v, m) = fbar(&w("ab"), &w("ba")).unwrap();
        assert_eq!(v.value(), Rational::new(1, 2));
        assert!(m.is_valid_for(&w("ab"), &w("ba")));
        assert_eq!(fbar(&Word::empty(), &Word::empty()).unwrap_err(), MetricError::EmptyInput);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(fbar_bruteforce(&w("ab"), &w("ba")).unwrap().value(), Rational::new(1, 2));
        assert_eq!(fbar_bruteforce(&w("a"), &w("b")).unwrap().value(), Rational::from_integer(1));
        let long = Word::single(Symbol(0), 13);
        assert!(matches!(fbar_bruteforce(&long, &w("a")), Err(MetricError::OracleSizeExceeded { .. })));
    }

    #[test]
    fn rle_examples() {
        let a = Word::from_runs([(Symbol(0), 1000), (Symbol(1), 1000)]);
        let b = Word::from_runs([(Symbol(1), 1000), (Symbol(0), 1000)]);
        let v = fbar_rle(&a, &b).unwrap();
        assert_eq!(v.match_size(), 1000);
        assert_eq!(v.value(), Rational::new(1, 2));
        assert_eq!(fbar_rle(&a, &a).unwrap().value(), Rational::from_integer(0));
    }

    #[test]
    fn double_examples() {
        let x = DoubleWord::new(w("abba"), w("aabb")).unwrap();
        assert_eq!(fbar_double(&x, &x).unwrap().value(), Rational::from_integer(0));
        let y = DoubleWord::new(w("abba"), w("cccc")).unwrap();
        assert_eq!(fbar_double(&x, &y).unwrap().value(), Rational::from_integer(1));
        assert_eq!(x.pair_runs().len(), 4);
    }

    fn product_encoding(x: &DoubleWord, y: &DoubleWord) -> (Word, Word) {
        let mut ids: BTreeMap<(Symbol, Symbol), u32> = BTreeMap::new();
        let mut encode = |d: &DoubleWord| {
            let syms: Vec<Symbol> = d
                .pairs()
                .into_iter()
                .map(|p| {
                    let n = ids.len() as u32;
                    Symbol(*ids.entry(p).or_insert(n))
                })
                .collect();
            Word::from_symbols(&syms)
        };
        let a = encode(x);
        let b = encode(y);
        (a, b)
    }

    fn arb_word(len: core::ops::Range<usize>, k: u32) -> impl Strategy<Value = Word> {
        prop::collection::vec(0..k, len).prop_map(|v| Word::from_ids(&v))
    }

    proptest! {
        #[test]
        fn double_equals_product_alphabet(
            (p1, s1, p2, s2) in (1usize..10, 1usize..10).prop_flat_map(|(n, m)| (
                arb_word(n..n + 1, 2), arb_word(n..n + 1, 2), arb_word(m..m + 1, 2), arb_word(m..m + 1, 2)))
        ) {
            let x = DoubleWord::new(p1, s1).unwrap();
            let y = DoubleWord::new(p2, s2).unwrap();
            let (a, b) = product_encoding(&x, &y);
            prop_assert_eq!(fbar_double(&x, &y).unwrap(), fbar(&a, &b).unwrap().0);
        }

        #[test]
        fn witness_is_valid_and_optimal(a in arb_word(1..12, 3), b in arb_word(1..12, 3)) {
            let (v, m) = fbar(&a, &b).unwrap();
            prop_assert!(m.is_valid_for(&a, &b));
            prop_assert_eq!(m.len() as u64, v.match_size());
            prop_assert_eq!(v, fbar_bruteforce(&a, &b).unwrap());
            prop_assert_eq!(v, fbar_rle(&a, &b).unwrap());
        }

        #[test]
        fn relabeling_invariance(a in arb_word(1..20, 3), b in arb_word(1..20, 3)) {
            let perm = [Symbol(2), Symbol(0), Symbol(1)];
            let (pa, pb) = (a.relabel(|s| perm[s.0 as usize]), b.relabel(|s| perm[s.0 as usize]));
            prop_assert_eq!(fbar(&a, &b).unwrap().0, fbar(&pa, &pb).unwrap().0);
        }
    }
}
