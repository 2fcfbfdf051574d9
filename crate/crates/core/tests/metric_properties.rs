use kakutani_core::metrics::{fbar_bruteforce, fbar_double, lcs_words, DoubleWord};
use kakutani_core::{fbar, fbar_rle, hamming, Symbol, Word};
use num_rational::Ratio;
use proptest::prelude::*;

/// Textbook quadratic LCS, kept separate from every library kernel.
fn naive_lcs(a: &[u32], b: &[u32]) -> u64 {
    let mut t = vec![vec![0u64; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] { t[i - 1][j - 1] + 1 } else { t[i - 1][j].max(t[i][j - 1]) };
        }
    }
    t[a.len()][b.len()]
}

fn oracle_fbar(a: &[u32], b: &[u32]) -> Ratio<u64> {
    let total = (a.len() + b.len()) as u64;
    Ratio::new(total - 2 * naive_lcs(a, b), total)
}

fn ids(max_len: usize, symbols: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..symbols, 1..=max_len)
}

/// Words with long runs, so the run kernel sees few runs but long lengths.
fn runs(max_runs: usize, symbols: u32) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..symbols, 1u64..40), 1..=max_runs)
        .prop_map(|rs| Word::from_runs(rs.into_iter().map(|(s, c)| (Symbol(s), c))))
}

fn expand(w: &Word) -> Vec<u32> {
    w.symbols().map(|s| s.0).collect()
}

proptest! {
    #[test]
    fn dp_and_runs_match_naive_oracle(a in ids(40, 3), b in ids(40, 3)) {
        let (wa, wb) = (Word::from_ids(&a), Word::from_ids(&b));
        let expected = oracle_fbar(&a, &b);
        let (v, m) = fbar(&wa, &wb).unwrap();
        prop_assert_eq!(v.value(), expected);
        prop_assert!(m.is_valid_for(&wa, &wb));
        prop_assert_eq!(m.len() as u64, naive_lcs(&a, &b));
        prop_assert_eq!(fbar_rle(&wa, &wb).unwrap().value(), expected);
    }

    #[test]
    fn bruteforce_matches_naive_oracle(a in ids(10, 3), b in ids(10, 3)) {
        let v = fbar_bruteforce(&Word::from_ids(&a), &Word::from_ids(&b)).unwrap();
        prop_assert_eq!(v.value(), oracle_fbar(&a, &b));
    }

    #[test]
    fn run_kernel_on_long_runs(a in runs(12, 3), b in runs(12, 3)) {
        prop_assert_eq!(lcs_words(&a, &b).unwrap(), naive_lcs(&expand(&a), &expand(&b)));
    }

    #[test]
    fn axioms(a in ids(24, 3), b in ids(24, 3)) {
        let (wa, wb) = (Word::from_ids(&a), Word::from_ids(&b));
        let ab = fbar_rle(&wa, &wb).unwrap().value();
        prop_assert_eq!(ab, fbar_rle(&wb, &wa).unwrap().value());
        prop_assert_eq!(fbar_rle(&wa, &wa).unwrap().value(), Ratio::from_integer(0));
        prop_assert!(ab <= Ratio::from_integer(1));
    }

    #[test]
    fn equal_length_bounds(n in 1usize..24, seed in any::<[u32; 3]>()) {
        let gen = |k: u32| -> Vec<u32> { (0..n as u32).map(|i| (i.wrapping_mul(2654435761) ^ seed[k as usize]).rotate_left(i % 31) % 3).collect() };
        let (a, b, c) = (Word::from_ids(&gen(0)), Word::from_ids(&gen(1)), Word::from_ids(&gen(2)));
        let f = |x: &Word, y: &Word| fbar_rle(x, y).unwrap().value();
        prop_assert!(f(&a, &b) <= hamming(&a, &b).unwrap());
        prop_assert!(f(&a, &c) <= f(&a, &b) + f(&b, &c));
    }

    #[test]
    fn double_word_is_fbar_over_pairs(a in ids(16, 2), b in ids(16, 2), c in ids(16, 2), d in ids(16, 2)) {
        let n = a.len().min(b.len());
        let m = c.len().min(d.len());
        let (a, b, c, d) = (&a[..n], &b[..n], &c[..m], &d[..m]);
        let x = DoubleWord::new(Word::from_ids(a), Word::from_ids(b)).unwrap();
        let y = DoubleWord::new(Word::from_ids(c), Word::from_ids(d)).unwrap();
        let px: Vec<u32> = a.iter().zip(b).map(|(p, q)| p * 2 + q).collect();
        let py: Vec<u32> = c.iter().zip(d).map(|(p, q)| p * 2 + q).collect();
        prop_assert_eq!(fbar_double(&x, &y).unwrap().value(), oracle_fbar(&px, &py));
    }
}

#[test]
fn worked_values() {
    let w = |s: &[u32]| Word::from_ids(s);
    // abab vs baba: LCS 3 of total 8.
    assert_eq!(fbar_rle(&w(&[0, 1, 0, 1]), &w(&[1, 0, 1, 0])).unwrap().value(), Ratio::new(1, 4));
    assert_eq!(fbar_rle(&w(&[0, 0]), &w(&[1, 1, 1])).unwrap().value(), Ratio::from_integer(1));
    let a = Word::from_runs([(Symbol(0), 4), (Symbol(1), 4)]);
    let b = Word::from_runs([(Symbol(1), 4), (Symbol(0), 4)]);
    assert_eq!(fbar_rle(&a, &b).unwrap().value(), Ratio::new(1, 2));
    assert_eq!(hamming(&a, &b).unwrap(), Ratio::from_integer(1));
}
