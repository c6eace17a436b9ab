//! Word-pair encodings of 1324-avoiding permutations and the upper bounds on
//! their growth rate that follow from counting constrained word pairs.
//!
//! * [`perm`]: permutations, pattern containment, avoider enumeration.
//! * [`encoder`]: red/blue colouring, A/B/C/D marking, `p -> (w(p), z(p))`.
//! * [`wordlang`]: CB-factors, segments, pair conditions, brute-force counts.
//! * [`series`]: exact polynomials and rational generating functions.
//! * [`roots`]: dominant denominator roots and growth bounds.

/// Builds a [`perm::Permutation`] from literal entries, panicking if they are
/// not a permutation of `1..=n`.
#[macro_export]
macro_rules! perm {
    ($($v:expr),* $(,)?) => {
        $crate::perm::Permutation::new(vec![$($v),*]).expect("literal permutation")
    };
}

pub mod encoder;
pub mod perm;
pub mod roots;
pub mod series;
pub mod wordlang;

pub use encoder::{encode, mark, MarkedPermutation, MarkingMode, WordPair};
pub use perm::{contains, count_avoiders, enumerate_avoiders, Pattern, Permutation};
pub use series::{IntPolynomial, RationalFunction};
pub use wordlang::{check_pair, ConstraintSet, Letter, Word};
