//! Moduli fans of rational marked curves.
//!
//! An abstract curve with `n` labeled ends is a metric tree; its
//! combinatorial type is the set of splits cut out by the bounded edges
//! ([`TreeType`]), and its metric is one positive length per split
//! ([`MarkedAbstractCurve`]). The distance vector of a curve determines it
//! up to adding vectors of the form `(a_i + a_j)_{i<j}`, so the moduli
//! space lives in the quotient of pair space by that subspace;
//! [`QnSpace`] provides an integral chart of the quotient. [`build_m0n`]
//! assembles the cones of all tree types into a marked fan in that chart.
//!
//! Parametrized curves add a map to `R^r`: contracted ends `x_1..x_n`
//! plus one end per direction vector of a [`Degree`]. Their moduli fan
//! is a product [`stable_maps_fan`], and the evaluation, forgetful, and
//! four-end projection maps become fan morphisms.

mod m0n;
mod maps;
mod qn;
mod tree;

pub use m0n::{build_m0n, forgetful_morphism, locate_curve, MAX_MODULI_CONES};
pub use maps::{directions, ev_morphism, ft4_morphism, stable_maps_fan, Degree};
pub use qn::{split_vector, QnSpace};
pub use tree::{enumerate_tree_types, splits_compatible, MarkedAbstractCurve, TreeType};

pub(crate) use maps::{ev_matrix, ft4_matrix};
pub(crate) use tree::canonical_side;

use thiserror::Error;

/// Errors raised by moduli constructions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuliError {
    /// a split side must keep at least two labels on each side
    #[error("mask {mask:#b} is not a proper split of {n} labels")]
    BadSplit { n: usize, mask: u64 },
    /// two splits that cannot come from edges of one tree
    #[error("splits {a:#b} and {b:#b} are incompatible")]
    IncompatibleSplits { a: u64, b: u64 },
    #[error("split {mask:#b} is listed twice")]
    DuplicateSplit { mask: u64 },
    #[error("at least {need} labels are required, got {got}")]
    TooFewLabels { need: usize, got: usize },
    #[error("{cones} maximal cones exceed the cap of {cap}")]
    TooLarge { cones: u128, cap: u128 },
    #[error("degree direction {index} is zero")]
    ZeroDirection { index: usize },
    #[error("degree directions must sum to zero")]
    UnbalancedDegree,
    #[error("expected vectors of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("the point is not in the moduli support")]
    NotInModuli,
}

/// Index of the pair `{i, j}`, `i < j`, in the lexicographic list of all
/// pairs from `0..n`.
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}
