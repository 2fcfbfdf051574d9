//! LCS on run-length encoded words.
//!
//! The DP table is cut into blocks, one per pair of runs. For each block only
//! its bottom and right boundaries are kept, as nondecreasing functions with
//! slopes 0 and 1. A block whose runs differ takes `max(top(j), left(i))`; a
//! block whose runs agree is filled along diagonals, so its bottom boundary is
//! the top boundary shifted by the block height with the reversed tail of the
//! left boundary in front (and symmetrically on the right). Both functions are
//! stored as breakpoints with a lazy offset, so every step only touches the
//! breakpoints that move.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::words::Run;

/// Largest run-pair grid the kernel will process.
pub const RLE_GRID_CAP: u64 = 1 << 28;

type Scratch = (Vec<(i64, i64)>, Vec<(i64, i64)>);

/// Grid size `(runs(x)) * (runs(y))`.
pub fn grid_cells(x: &[Run], y: &[Run]) -> u64 {
    x.len() as u64 * y.len() as u64
}

/// LCS length of the two run sequences, `None` if the grid exceeds
/// [`RLE_GRID_CAP`].
pub fn rle_lcs(x: &[Run], y: &[Run]) -> Option<u64> {
    if x.is_empty() || y.is_empty() {
        return Some(0);
    }
    if grid_cells(x, y) > RLE_GRID_CAP {
        return None;
    }
    // Column boundaries persist across rows; keep the shorter list there.
    let (x, y) = if y.len() > x.len() { (y, x) } else { (x, y) };
    let len = |r: &Run| i64::try_from(r.count).ok();
    let ps: Vec<i64> = x.iter().map(len).collect::<Option<_>>()?;
    let qs: Vec<i64> = y.iter().map(len).collect::<Option<_>>()?;
    let mut cols: Vec<Edge> = qs.iter().map(|&q| Edge::flat(q, 0)).collect();
    let mut scratch = (Vec::new(), Vec::new());
    let mut lcs = 0;
    for (xr, &p) in x.iter().zip(&ps) {
        let mut row = Edge::flat(p, 0);
        for ((yr, &q), col) in y.iter().zip(&qs).zip(cols.iter_mut()) {
            if xr.symbol == yr.symbol {
                matched(col, &mut row, p, q, &mut scratch);
            } else {
                let (below, right) = (col.last().1, row.last().1);
                col.clamp_min(right);
                row.clamp_min(below);
            }
        }
        lcs = row.last().1;
    }
    u64::try_from(lcs).ok()
}

/// Block of height `p` and width `q` filled with matches.
fn matched(col: &mut Edge, row: &mut Edge, p: i64, q: i64, scratch: &mut Scratch) {
    let m = p.min(q);
    let (col_tail, row_tail) = scratch;
    col.tail(m, col_tail);
    row.tail(m, row_tail);
    // Bottom: j >= p reads col(j - p) + p, j < p reads row(p - j) + j.
    let bottom = row_tail.iter().map(|&(i, v)| (p - i, v + p - i));
    if q > p {
        col.truncate(q - p);
        col.shift(p);
        bottom.for_each(|pt| col.push_front(pt));
    } else {
        col.rebuild(bottom);
    }
    let right = col_tail.iter().map(|&(j, v)| (q - j, v + q - j));
    if p > q {
        row.truncate(p - q);
        row.shift(q);
        right.for_each(|pt| row.push_front(pt));
    } else {
        row.rebuild(right);
    }
}

fn interp((x0, y0): (i64, i64), (_, y1): (i64, i64), x: i64) -> i64 {
    if y1 == y0 {
        y0
    } else {
        y0 + (x - x0)
    }
}

fn collinear(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> bool {
    (b.1 - a.1) * (c.0 - b.0) == (c.1 - b.1) * (b.0 - a.0)
}

/// Boundary function on `[0, len]`; true points are stored points plus `off`
/// in both coordinates.
struct Edge {
    pts: VecDeque<(i64, i64)>,
    off: i64,
}

impl Edge {
    fn flat(len: i64, value: i64) -> Self {
        let mut pts = VecDeque::with_capacity(2);
        pts.push_back((0, value));
        if len > 0 {
            pts.push_back((len, value));
        }
        Edge { pts, off: 0 }
    }

    /// Replaces the points with ones given in decreasing `x`, ending at `x = 0`.
    fn rebuild(&mut self, points: impl Iterator<Item = (i64, i64)>) {
        self.pts.clear();
        self.off = 0;
        points.for_each(|pt| self.push_front(pt));
    }

    fn at(&self, i: usize) -> (i64, i64) {
        let (x, y) = self.pts[i];
        (x + self.off, y + self.off)
    }

    fn last(&self) -> (i64, i64) {
        self.at(self.pts.len() - 1)
    }

    fn shift(&mut self, d: i64) {
        self.off += d;
    }

    fn push_front(&mut self, pt: (i64, i64)) {
        if let Some(&a) = self.pts.front() {
            let a = (a.0 + self.off, a.1 + self.off);
            if a.0 == pt.0 {
                return;
            }
            if self.pts.len() >= 2 && collinear(pt, a, self.at(1)) {
                self.pts.pop_front();
            }
        }
        self.pts.push_front((pt.0 - self.off, pt.1 - self.off));
    }

    /// Breakpoints on `[len - m, len]`, in increasing `x`.
    fn tail(&self, m: i64, out: &mut Vec<(i64, i64)>) {
        let start = self.last().0 - m;
        out.clear();
        let mut i = self.pts.len() - 1;
        loop {
            let pt = self.at(i);
            if pt.0 <= start {
                out.push(if pt.0 == start { pt } else { (start, interp(pt, self.at(i + 1), start)) });
                break;
            }
            out.push(pt);
            i -= 1;
        }
        out.reverse();
    }

    /// Restricts the domain to `[0, len]`.
    fn truncate(&mut self, len: i64) {
        while self.pts.len() >= 2 && self.at(self.pts.len() - 2).0 >= len {
            self.pts.pop_back();
        }
        let n = self.pts.len();
        let b = self.at(n - 1);
        if b.0 > len {
            let y = interp(self.at(n - 2), b, len);
            self.pts[n - 1] = (len - self.off, y - self.off);
        }
    }

    /// Pointwise `max(self, c)`.
    fn clamp_min(&mut self, c: i64) {
        if self.at(0).1 >= c {
            return;
        }
        let end = self.last();
        if end.1 <= c {
            self.rebuild([(end.0, c), (0, c)].into_iter());
            return;
        }
        while self.at(1).1 <= c {
            self.pts.pop_front();
        }
        let (x0, y0) = self.at(0);
        self.pts.pop_front();
        self.push_front((x0 + (c - y0), c));
        self.push_front((0, c));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::lcs::lcs_length_dp;
    use crate::words::{Symbol, Word};
    use proptest::prelude::*;

    fn lcs_plain(a: &Word, b: &Word) -> u64 {
        let x: Vec<Symbol> = a.symbols().collect();
        let y: Vec<Symbol> = b.symbols().collect();
        lcs_length_dp(&x, &y) as u64
    }

    #[test]
    fn block_swap() {
        let a = Word::from_runs([(Symbol(0), 1000), (Symbol(1), 1000)]);
        let b = Word::from_runs([(Symbol(1), 1000), (Symbol(0), 1000)]);
        assert_eq!(rle_lcs(a.runs(), b.runs()), Some(1000));
        let a = Word::from_runs([(Symbol(0), 10), (Symbol(1), 10)]);
        let b = Word::from_runs([(Symbol(1), 10), (Symbol(0), 10)]);
        assert_eq!(rle_lcs(a.runs(), b.runs()), Some(lcs_plain(&a, &b)));
    }

    #[test]
    fn walk_through_several_runs() {
        // a^2 b a^3 b a^4 against a^9: the long run collects all the a's.
        let a = Word::from_runs([(Symbol(0), 2), (Symbol(1), 1), (Symbol(0), 3), (Symbol(1), 1), (Symbol(0), 4)]);
        let b = Word::single(Symbol(0), 9);
        assert_eq!(rle_lcs(a.runs(), b.runs()), Some(9));
        assert_eq!(rle_lcs(b.runs(), a.runs()), Some(9));
    }

    #[test]
    fn long_runs_against_short_runs() {
        let a = Word::from_runs((0..40).map(|i| (Symbol(i % 3), 1 + (i as u64 * 7) % 5)));
        let b = Word::from_runs((0..4).map(|i| (Symbol(i % 3), 30)));
        for (x, y) in [(&a, &b), (&b, &a)] {
            assert_eq!(rle_lcs(x.runs(), y.runs()), Some(lcs_plain(x, y)));
        }
    }

    fn arb_word(max_runs: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0u32..3, 1u64..12), 0..max_runs)
            .prop_map(|runs| Word::from_runs(runs.into_iter().map(|(s, c)| (Symbol(s), c))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn agrees_with_plain_dp(a in arb_word(40), b in arb_word(40)) {
            prop_assert_eq!(rle_lcs(a.runs(), b.runs()), Some(lcs_plain(&a, &b)));
        }

        #[test]
        fn agrees_on_mixed_run_lengths(a in prop::collection::vec((0u32..3, 1u64..4), 0..40), b in prop::collection::vec((0u32..3, 10u64..60), 0..6)) {
            let a = Word::from_runs(a.into_iter().map(|(s, c)| (Symbol(s), c)));
            let b = Word::from_runs(b.into_iter().map(|(s, c)| (Symbol(s), c)));
            prop_assert_eq!(rle_lcs(a.runs(), b.runs()), Some(lcs_plain(&a, &b)));
            prop_assert_eq!(rle_lcs(b.runs(), a.runs()), Some(lcs_plain(&a, &b)));
        }

        #[test]
        fn agrees_on_binary_words(a in prop::collection::vec((0u32..2, 1u64..5), 0..30), b in prop::collection::vec((0u32..2, 1u64..5), 0..30)) {
            let a = Word::from_runs(a.into_iter().map(|(s, c)| (Symbol(s), c)));
            let b = Word::from_runs(b.into_iter().map(|(s, c)| (Symbol(s), c)));
            prop_assert_eq!(rle_lcs(a.runs(), b.runs()), Some(lcs_plain(&a, &b)));
        }
    }
}
