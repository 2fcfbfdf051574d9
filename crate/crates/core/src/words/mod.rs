//! Run-length words, alphabets with spacers, and construction sequences.

mod alphabet;
mod construction;
mod plan;
mod word;

pub use alphabet::{strip_spacers, Alphabet, AlphabetError};
pub use construction::{
    check_a1, check_a2, check_a3, check_a4, decompose, word_sequences, ConstructionError,
    ConstructionLevel, ConstructionSequence, LevelParams, LevelPlan, NextLevel, Piece,
};
pub use plan::{
    build_from_tree_plan, derive_parameters_from_tree, derive_parameters_with, TreePlan,
    TreePlanLevel, DEFAULT_PLAN_PATTERNS,
};
pub use word::{ExpansionError, Run, RunIndex, Symbol, Word, DEFAULT_EXPANSION_CAP};
