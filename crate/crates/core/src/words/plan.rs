//! Tree-parameterized plan sequences: a demonstrative map from trees to
//! pattern-type choices per level.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::alphabet::Alphabet;
use super::construction::{ConstructionError, ConstructionSequence};
use crate::feldman::{level_plan, PatternType};
use crate::hash::{mix64, Fnv1a};
use crate::trees::Tree;
use crate::Rational;

/// Number of patterns `M` used by [`derive_parameters_from_tree`].
pub const DEFAULT_PLAN_PATTERNS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePlanLevel {
    pub level: usize,
    /// Tree nodes of length `level`.
    pub node_count: usize,
    /// FNV-1a digest of those nodes in sorted order; 0 when there are none.
    pub digest: u64,
    /// Pattern types of the words of this level.
    pub types: Vec<PatternType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePlan {
    pub m: u32,
    pub levels: Vec<TreePlanLevel>,
}

pub fn derive_parameters_from_tree(tree: &Tree, depth: usize) -> TreePlan {
    derive_parameters_with(tree, depth, DEFAULT_PLAN_PATTERNS)
}

/// Level `n` (1-based) gets the two types `π` and `π` reversed, where `π` is a
/// permutation of `1..=m` drawn from the digest of the length-`n` nodes. A
/// level without nodes keeps the identity.
pub fn derive_parameters_with(tree: &Tree, depth: usize, m: u32) -> TreePlan {
    let m = m.max(1);
    let levels = (1..=depth)
        .map(|n| {
            let mut h = Fnv1a::new();
            let mut count = 0;
            for node in tree.nodes_of_length(n) {
                count += 1;
                h.write_u64(node.len() as u64);
                for &x in &node.0 {
                    h.write_u64(x);
                }
            }
            let digest = if count == 0 { 0 } else { h.finish() };
            let mut perm: Vec<u32> = (1..=m).collect();
            if count > 0 {
                let mut state = digest;
                for i in (1..perm.len()).rev() {
                    state = mix64(state);
                    perm.swap(i, (state % (i as u64 + 1)) as usize);
                }
            }
            let ty = PatternType(perm);
            TreePlanLevel { level: n, node_count: count, digest, types: vec![ty.clone(), ty.reversed()] }
        })
        .collect();
    TreePlan { m, levels }
}

/// Builds the non-circular sequence over two letters whose level `n` words
/// are the type words of the plan's level `n`. Returns the sequence and the
/// unique-readability verdict of each new level.
pub fn build_from_tree_plan(plan: &TreePlan, t: u64) -> Result<(ConstructionSequence, Vec<bool>), ConstructionError> {
    let mut seq = ConstructionSequence::new(Alphabet::letters(2), false)?;
    let mut readable = Vec::with_capacity(plan.levels.len());
    for level in &plan.levels {
        let lp = level_plan(seq.top().words.len(), t, plan.m, &level.types, Rational::zero())
            .map_err(|e| ConstructionError::PlanInfeasible(alloc::format!("{e}")))?;
        let next = seq.build_next_level(&lp)?;
        readable.push(next.uniquely_readable);
        seq = next.sequence;
    }
    Ok((seq, readable))
}
