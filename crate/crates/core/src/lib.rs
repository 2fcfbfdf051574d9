//! Combinatorial and dynamical machinery for experiments around Kakutani
//! equivalence: prefix-closed trees, run-length words and construction
//! sequences, Feldman patterns, the `f̄` match metric, stationary codes,
//! cutting-and-stacking towers, skew products and special flows.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the experiment
//! registry and the command-line driver live in the `kakutani` companion crate.
//!
//! Exact quantities (metric values, tower masses, conjugacy residuals in
//! rational mode) are computed with integer or rational arithmetic. Ergodic
//! averages and flow simulations run in `f64` with explicit tolerances.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod codes;
pub mod feldman;
pub mod flows;
pub mod hash;
pub mod metrics;
pub mod real;
pub mod systems;
pub mod trees;
pub mod words;

pub use codes::FiniteCode;
pub use feldman::{FeldmanPattern, FeldmanSpec};
pub use metrics::{fbar, fbar_rle, hamming, FbarValue, Match};
pub use trees::{FiniteSequence, Tree};
pub use words::{Alphabet, ConstructionLevel, ConstructionSequence, Run, Symbol, Word};

/// Exact rational used for masses, frequencies and distances.
pub type Rational = num_rational::Ratio<u64>;

/// Signed exact rational used for phases and rotation angles.
pub type SignedRational = num_rational::Ratio<i64>;
