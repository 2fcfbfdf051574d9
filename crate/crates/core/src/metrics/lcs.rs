//! Longest common subsequence kernels on expanded sequences.

use alloc::vec;
use alloc::vec::Vec;

/// LCS length by the bit-parallel recurrence `V' = (V + (V & M)) | (V & !M)`
/// over 64-bit words; `O(n * m / 64)`.
pub fn lcs_length<T: Ord + Copy>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let m = b.len();
    let words = m.div_ceil(64);
    let mut alphabet: Vec<T> = b.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    let mut masks = vec![0u64; alphabet.len() * words];
    for (j, s) in b.iter().enumerate() {
        let idx = alphabet.binary_search(s).expect("symbol of b");
        masks[idx * words + j / 64] |= 1 << (j % 64);
    }
    let mut v = vec![!0u64; words];
    if m % 64 != 0 {
        v[words - 1] = (1u64 << (m % 64)) - 1;
    }
    for s in a {
        let Ok(idx) = alphabet.binary_search(s) else { continue };
        let mask = &masks[idx * words..(idx + 1) * words];
        let mut carry = 0u64;
        for w in 0..words {
            let u = v[w] & mask[w];
            let (s1, c1) = v[w].overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = u64::from(c1 || c2);
            v[w] = s2 | (v[w] & !mask[w]);
        }
    }
    if m % 64 != 0 {
        v[words - 1] &= (1u64 << (m % 64)) - 1;
    }
    let ones: usize = v.iter().map(|w| w.count_ones() as usize).sum();
    m - ones
}

/// Textbook quadratic DP, one row of memory.
pub fn lcs_length_dp<T: Eq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0u32; b.len() + 1];
    lcs_row(a.iter(), b, &mut row);
    row[b.len()] as usize
}

/// `row[j] = LCS(a, b[..j])`.
fn lcs_row<'a, T: Eq + 'a, I: Iterator<Item = &'a T>>(a: I, b: &[T], row: &mut [u32]) {
    row.iter_mut().for_each(|x| *x = 0);
    for x in a {
        let mut diag = 0u32;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
}

/// Maximum match as 0-based index pairs, by divide and conquer in linear
/// memory. Ties in the split column go to the leftmost column, and a single
/// remaining symbol of `a` is matched to its leftmost partner in `b`.
pub fn lcs_witness<T: Eq + Clone>(a: &[T], b: &[T]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut fwd = vec![0u32; b.len() + 1];
    let mut bwd = vec![0u32; b.len() + 1];
    hirschberg(a, b, 0, 0, &mut out, &mut fwd, &mut bwd);
    out
}

fn hirschberg<T: Eq + Clone>(
    a: &[T],
    b: &[T],
    oa: usize,
    ob: usize,
    out: &mut Vec<(usize, usize)>,
    fwd: &mut Vec<u32>,
    bwd: &mut Vec<u32>,
) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if a.len() == 1 {
        if let Some(j) = b.iter().position(|y| *y == a[0]) {
            out.push((oa, ob + j));
        }
        return;
    }
    let mid = a.len() / 2;
    let m = b.len();
    lcs_row(a[..mid].iter(), b, &mut fwd[..=m]);
    let rb: Vec<T> = b.iter().rev().cloned().collect();
    lcs_row(a[mid..].iter().rev(), &rb, &mut bwd[..=m]);
    let mut split = 0;
    let mut best = 0;
    for k in 0..=m {
        let v = fwd[k] + bwd[m - k];
        if v > best || k == 0 {
            best = v;
            split = k;
        }
    }
    hirschberg(&a[..mid], &b[..split], oa, ob, out, fwd, bwd);
    hirschberg(&a[mid..], &b[split..], oa + mid, ob + split, out, fwd, bwd);
}
