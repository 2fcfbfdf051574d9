//! Finite trees over finite sequences of natural numbers.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteSequence(pub Vec<u64>);

impl FiniteSequence {
    pub fn empty() -> Self {
        FiniteSequence(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, n: usize) -> FiniteSequence {
        FiniteSequence(self.0[..n].to_vec())
    }

    pub fn is_prefix_of(&self, other: &FiniteSequence) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Canonical enumeration order: by length, then lexicographic.
    pub fn canonical_cmp(&self, other: &FiniteSequence) -> core::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl From<Vec<u64>> for FiniteSequence {
    fn from(v: Vec<u64>) -> Self {
        FiniteSequence(v)
    }
}

impl fmt::Display for FiniteSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    InvalidTree,
    EntryBoundExceeded { entry: u64, bound: u64 },
    /// Bit vector whose set bits are not prefix closed.
    InvalidEncoding { index: usize },
    Parse { line: usize, message: String },
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::InvalidTree => write!(f, "node set is not a tree (missing root or not prefix closed)"),
            TreeError::EntryBoundExceeded { entry, bound } => {
                write!(f, "entry {entry} exceeds the declared entry bound {bound}")
            }
            TreeError::InvalidEncoding { index } => {
                write!(f, "bit {index} marks a node whose parent is absent")
            }
            TreeError::Parse { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TreeError {}

/// A finite set of sequences. Iteration is sorted, so every derived quantity
/// is deterministic. Use [`Tree::validate`] to check the tree axioms on
/// arbitrary node sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tree {
    nodes: BTreeSet<FiniteSequence>,
}

impl Default for Tree {
    fn default() -> Self {
        Tree::root()
    }
}

impl Tree {
    /// The tree `{∅}`.
    pub fn root() -> Self {
        let mut nodes = BTreeSet::new();
        nodes.insert(FiniteSequence::empty());
        Tree { nodes }
    }

    /// Wraps a raw node set without checking it.
    pub fn from_nodes<I: IntoIterator<Item = FiniteSequence>>(nodes: I) -> Self {
        Tree { nodes: nodes.into_iter().collect() }
    }

    /// Prefix closure of the given sequences (always a valid tree).
    pub fn closure<I: IntoIterator<Item = FiniteSequence>>(seqs: I) -> Self {
        let mut t = Tree::root();
        for s in seqs {
            t.insert_with_ancestors(&s);
        }
        t
    }

    pub fn nodes(&self) -> impl Iterator<Item = &FiniteSequence> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, s: &FiniteSequence) -> bool {
        self.nodes.contains(s)
    }

    /// Contains the empty sequence and is closed under initial segments.
    pub fn validate(&self) -> bool {
        self.nodes.contains(&FiniteSequence::empty())
            && self
                .nodes
                .iter()
                .all(|s| s.is_empty() || self.nodes.contains(&s.prefix(s.len() - 1)))
    }

    pub fn insert_with_ancestors(&mut self, s: &FiniteSequence) {
        for n in 0..=s.len() {
            self.nodes.insert(s.prefix(n));
        }
    }

    pub fn with_ancestors(&self, s: &FiniteSequence) -> Tree {
        let mut t = self.clone();
        t.insert_with_ancestors(s);
        t
    }

    pub fn max_branch_length(&self) -> Result<usize, TreeError> {
        if !self.validate() {
            return Err(TreeError::InvalidTree);
        }
        Ok(self.nodes.iter().map(FiniteSequence::len).max().unwrap_or(0))
    }

    /// Nodes of length exactly `n`, sorted.
    pub fn nodes_of_length(&self, n: usize) -> impl Iterator<Item = &FiniteSequence> {
        self.nodes.iter().filter(move |s| s.len() == n)
    }

    pub fn max_entry(&self) -> Option<u64> {
        self.nodes.iter().flat_map(|s| s.0.iter().copied()).max()
    }

    /// Bits `σ_0, …, σ_{n-1}` of the canonical enumeration over entries
    /// `0..=entry_bound`: bit `i` is set iff `σ_i` is a node.
    pub fn encode_enumeration(&self, n: usize, entry_bound: u64) -> Result<Vec<bool>, TreeError> {
        if !self.validate() {
            return Err(TreeError::InvalidTree);
        }
        if let Some(e) = self.max_entry() {
            if e > entry_bound {
                return Err(TreeError::EntryBoundExceeded { entry: e, bound: entry_bound });
            }
        }
        Ok(Enumeration::new(entry_bound).take(n).map(|s| self.contains(&s)).collect())
    }

    /// Inverse of [`Tree::encode_enumeration`] for the same entry bound.
    pub fn decode_enumeration(bits: &[bool], entry_bound: u64) -> Result<Tree, TreeError> {
        let mut nodes = BTreeSet::new();
        for (i, (bit, s)) in bits.iter().zip(Enumeration::new(entry_bound)).enumerate() {
            if !*bit {
                continue;
            }
            if !s.is_empty() && !nodes.contains(&s.prefix(s.len() - 1)) {
                return Err(TreeError::InvalidEncoding { index: i });
            }
            nodes.insert(s);
        }
        if !nodes.contains(&FiniteSequence::empty()) {
            return Err(TreeError::InvalidEncoding { index: 0 });
        }
        Ok(Tree { nodes })
    }

    /// Number of enumeration indices needed to cover every node.
    pub fn enumeration_span(&self, entry_bound: u64) -> Result<usize, TreeError> {
        let depth = self.max_branch_length()?;
        let base = entry_bound as usize + 1;
        let mut total = 0usize;
        let mut level = 1usize;
        for _ in 0..=depth {
            total = total.checked_add(level).ok_or(TreeError::InvalidTree)?;
            level = level.checked_mul(base).ok_or(TreeError::InvalidTree)?;
        }
        Ok(total)
    }

    /// Text form: one node per line, entries separated by spaces, the empty
    /// line standing for `∅`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.nodes {
            for (i, x) in s.0.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&alloc::format!("{x}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`Tree::to_text`] output. Lines starting with `#` are comments.
    /// The resulting tree is validated.
    pub fn from_text(text: &str) -> Result<Tree, TreeError> {
        let mut nodes = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            let mut seq = Vec::new();
            for tok in line.split_whitespace() {
                let v = tok.parse::<u64>().map_err(|_| TreeError::Parse {
                    line: i + 1,
                    message: alloc::format!("`{tok}` is not a natural number"),
                })?;
                seq.push(v);
            }
            nodes.insert(FiniteSequence(seq));
        }
        let t = Tree { nodes };
        if !t.validate() {
            return Err(TreeError::InvalidTree);
        }
        Ok(t)
    }
}

/// The canonical enumeration `σ_0, σ_1, …` of sequences with entries in
/// `0..=bound`: by length, then lexicographic. Prefixes come first.
#[derive(Debug, Clone)]
pub struct Enumeration {
    bound: u64,
    next: Option<Vec<u64>>,
}

impl Enumeration {
    pub fn new(bound: u64) -> Self {
        Enumeration { bound, next: Some(Vec::new()) }
    }
}

impl Iterator for Enumeration {
    type Item = FiniteSequence;

    fn next(&mut self) -> Option<FiniteSequence> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                succ = vec![0; cur.len() + 1];
                break;
            }
            i -= 1;
            if succ[i] < self.bound {
                succ[i] += 1;
                break;
            }
            succ[i] = 0;
        }
        self.next = Some(succ);
        Some(FiniteSequence(cur))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    /// Contains a chain of length `depth`.
    DeepBranch,
    /// Every branch is shorter than `depth`, with at least `depth` nodes.
    BoundedBranch,
}

/// Deterministic finite surrogates for trees with and without long branches.
pub fn generate_gadget(kind: GadgetKind, depth: usize, seed: u64) -> Tree {
    let depth = depth.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tree::root();
    let max_len = match kind {
        GadgetKind::DeepBranch => {
            let chain: Vec<u64> = (0..depth).map(|_| rng.gen_range(0..4)).collect();
            t.insert_with_ancestors(&FiniteSequence(chain));
            depth
        }
        GadgetKind::BoundedBranch => depth - 1,
    };
    // Bushy decoration below the length cap.
    let extra = depth + rng.gen_range(0..=depth);
    let mut attempts = 0;
    while (t.len() < depth + 1 || attempts < extra) && attempts < 64 * (depth + 1) {
        attempts += 1;
        let len = if max_len == 0 { 0 } else { rng.gen_range(1..=max_len) };
        let s: Vec<u64> = (0..len).map(|_| rng.gen_range(0..4)).collect();
        t.insert_with_ancestors(&FiniteSequence(s));
        if max_len == 0 {
            break;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(v: &[u64]) -> FiniteSequence {
        FiniteSequence(v.to_vec())
    }

    #[test]
    fn validate_examples() {
        assert!(Tree::root().validate());
        assert!(Tree::from_nodes([seq(&[]), seq(&[0]), seq(&[0, 1])]).validate());
        assert!(!Tree::from_nodes([seq(&[]), seq(&[0, 1])]).validate());
        assert!(!Tree::from_nodes([seq(&[0])]).validate());
    }

    #[test]
    fn insert_examples() {
        let t = Tree::root().with_ancestors(&seq(&[2, 5]));
        assert_eq!(t, Tree::from_nodes([seq(&[]), seq(&[2]), seq(&[2, 5])]));
        let u = t.with_ancestors(&seq(&[]));
        assert_eq!(u, t);
        let v = Tree::from_nodes([seq(&[]), seq(&[0])]).with_ancestors(&seq(&[0, 0, 0]));
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn branch_lengths() {
        assert_eq!(Tree::root().max_branch_length(), Ok(0));
        let t = Tree::closure([seq(&[0, 1]), seq(&[3])]);
        assert_eq!(t.max_branch_length(), Ok(2));
        assert_eq!(Tree::from_nodes([seq(&[1])]).max_branch_length(), Err(TreeError::InvalidTree));
    }

    #[test]
    fn encoding_examples() {
        assert_eq!(Tree::root().encode_enumeration(1, 0), Ok(vec![true]));
        let t = Tree::closure([seq(&[0])]);
        assert_eq!(t.encode_enumeration(3, 1), Ok(vec![true, true, false]));
        let wide = Tree::closure([seq(&[7])]);
        assert!(matches!(wide.encode_enumeration(3, 1), Err(TreeError::EntryBoundExceeded { .. })));
    }

    #[test]
    fn enumeration_order_starts_correctly() {
        let first: Vec<FiniteSequence> = Enumeration::new(1).take(7).collect();
        assert_eq!(
            first,
            vec![seq(&[]), seq(&[0]), seq(&[1]), seq(&[0, 0]), seq(&[0, 1]), seq(&[1, 0]), seq(&[1, 1])]
        );
    }

    #[test]
    fn enumeration_places_prefixes_first() {
        for bound in [0u64, 1, 2, 4] {
            let seqs: Vec<FiniteSequence> = Enumeration::new(bound).take(if bound == 0 { 200 } else { 10_000 }).collect();
            let index: alloc::collections::BTreeMap<&FiniteSequence, usize> =
                seqs.iter().enumerate().map(|(i, s)| (s, i)).collect();
            for (n, s) in seqs.iter().enumerate() {
                for k in 0..s.len() {
                    let m = index[&s.prefix(k)];
                    assert!(m <= n);
                }
            }
        }
    }

    #[test]
    fn gadgets_meet_contract() {
        for depth in 1..8 {
            for seed in 0..20 {
                let deep = generate_gadget(GadgetKind::DeepBranch, depth, seed);
                assert!(deep.validate());
                assert_eq!(deep.max_branch_length(), Ok(depth));
                let bounded = generate_gadget(GadgetKind::BoundedBranch, depth, seed);
                assert!(bounded.validate());
                assert!(bounded.max_branch_length().unwrap() < depth);
                if depth > 1 {
                    assert!(bounded.len() >= depth);
                }
                assert_eq!(bounded, generate_gadget(GadgetKind::BoundedBranch, depth, seed));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let t = Tree::closure([seq(&[0, 1]), seq(&[3, 2, 2])]);
        assert_eq!(Tree::from_text(&t.to_text()), Ok(t));
        assert_eq!(Tree::from_text("\n"), Ok(Tree::root()));
        assert!(Tree::from_text("\n0 1\n").is_err());
    }

    fn arb_tree() -> impl Strategy<Value = Tree> {
        prop::collection::vec(prop::collection::vec(0u64..3, 0..4), 0..8)
            .prop_map(|v| Tree::closure(v.into_iter().map(FiniteSequence)))
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(t in arb_tree()) {
            let n = t.enumeration_span(2).unwrap();
            let bits = t.encode_enumeration(n, 2).unwrap();
            prop_assert_eq!(Tree::decode_enumeration(&bits, 2).unwrap(), t);
        }

        #[test]
        fn insert_raises_depth_to_max(t in arb_tree(), s in prop::collection::vec(0u64..5, 0..6)) {
            let before = t.max_branch_length().unwrap();
            let after = t.with_ancestors(&FiniteSequence(s.clone())).max_branch_length().unwrap();
            prop_assert_eq!(after, before.max(s.len()));
        }
    }
}
