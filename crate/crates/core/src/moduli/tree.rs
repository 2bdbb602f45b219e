//! Combinatorial types of labeled trees and their metric realizations.
//!
//! A tree with `n` labeled ends is recorded by its splits: every bounded
//! edge cuts the labels into two sides, and the tree is recovered from
//! the set of these two-part partitions. A side is stored as a `u64`
//! bitmask; the canonical representative of a split is the side
//! containing label 0.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::linalg::{Rat, RatVec};

use super::{pair_index, ModuliError};

/// Mask of all `n` labels.
pub(crate) fn full_mask(n: usize) -> u64 {
    debug_assert!((1..=64).contains(&n));
    u64::MAX >> (64 - n)
}

/// The side of the split containing label 0.
pub(crate) fn canonical_side(mask: u64, n: usize) -> u64 {
    if mask & 1 == 1 {
        mask
    } else {
        full_mask(n) ^ mask
    }
}

/// Whether two splits can be cut by edges of a single tree: one of the
/// four intersections of sides must be empty.
pub fn splits_compatible(a: u64, b: u64, n: usize) -> bool {
    let full = full_mask(n);
    (a & b) == 0 || (a & !b & full) == 0 || (!a & b & full) == 0 || (!a & !b & full) == 0
}

/// The combinatorial type of a tree with `n` labeled ends: a compatible
/// set of splits, one per bounded edge. Vertices are implicit; a type
/// with the maximal number `n - 3` of splits is trivalent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeType {
    n: usize,
    splits: Vec<u64>,
}

impl TreeType {
    /// Validates sides, pairwise compatibility, and duplicates; stores
    /// each split by its canonical side, sorted.
    pub fn new(n: usize, splits: impl IntoIterator<Item = u64>) -> Result<TreeType, ModuliError> {
        if n < 3 {
            return Err(ModuliError::TooFewLabels { need: 3, got: n });
        }
        assert!(n <= 64, "labels are stored in a 64-bit mask");
        let full = full_mask(n);
        let mut canon = Vec::new();
        for mask in splits {
            if mask & !full != 0 {
                return Err(ModuliError::BadSplit { n, mask });
            }
            let side = canonical_side(mask, n);
            let k = side.count_ones() as usize;
            if k < 2 || k > n - 2 {
                return Err(ModuliError::BadSplit { n, mask });
            }
            canon.push(side);
        }
        canon.sort_unstable();
        for w in canon.windows(2) {
            if w[0] == w[1] {
                return Err(ModuliError::DuplicateSplit { mask: w[0] });
            }
        }
        for (i, &a) in canon.iter().enumerate() {
            for &b in &canon[i + 1..] {
                if !splits_compatible(a, b, n) {
                    return Err(ModuliError::IncompatibleSplits { a, b });
                }
            }
        }
        Ok(TreeType { n, splits: canon })
    }

    /// The tree with a single vertex and no bounded edges.
    pub fn star(n: usize) -> Result<TreeType, ModuliError> {
        TreeType::new(n, [])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonical split sides, sorted ascending.
    pub fn splits(&self) -> &[u64] {
        &self.splits
    }

    /// All vertices have valence three exactly when the number of
    /// splits is maximal.
    pub fn is_trivalent(&self) -> bool {
        self.splits.len() == self.n - 3
    }
}

/// All combinatorial types on `n` labels, sorted and duplicate free;
/// with `only_trivalent` just those with the maximal split count.
///
/// Trivalent trees are grown by attaching one label at a time to each
/// edge of each smaller tree, which reaches every type exactly once;
/// general types are the subsets of trivalent split sets.
pub fn enumerate_tree_types(n: usize, only_trivalent: bool) -> Result<Vec<TreeType>, ModuliError> {
    if n < 3 {
        return Err(ModuliError::TooFewLabels { need: 3, got: n });
    }
    assert!(n <= 64, "labels are stored in a 64-bit mask");
    // grow split sets as far sides (masks without label 0)
    let mut trees: Vec<Vec<u64>> = vec![Vec::new()];
    for j in 3..n {
        let bit = 1u64 << j;
        let mut next = Vec::with_capacity(trees.len() * (2 * j - 3));
        for t in &trees {
            // attach inside a bounded edge: the edge splits in two, and
            // every split beyond it gains the new label
            for (k, &m) in t.iter().enumerate() {
                let mut s = Vec::with_capacity(t.len() + 1);
                for (k2, &m2) in t.iter().enumerate() {
                    if k2 == k {
                        s.push(m2);
                        s.push(m2 | bit);
                    } else if m & !m2 == 0 {
                        s.push(m2 | bit);
                    } else {
                        s.push(m2);
                    }
                }
                next.push(s);
            }
            // attach to the end holding label l >= 1
            for l in 1..j {
                let lb = 1u64 << l;
                let mut s: Vec<u64> = t
                    .iter()
                    .map(|&m2| if m2 & lb != 0 { m2 | bit } else { m2 })
                    .collect();
                s.push(lb | bit);
                next.push(s);
            }
            // attach to the end holding label 0
            let mut s = t.clone();
            s.push(full_mask(j) ^ 1);
            next.push(s);
        }
        trees = next;
    }
    let trivalent: Vec<TreeType> = trees
        .into_iter()
        .map(|s| TreeType::new(n, s).expect("label insertion produces valid trees"))
        .collect();
    if only_trivalent {
        let mut out = trivalent;
        out.sort_unstable();
        return Ok(out);
    }
    let mut all: BTreeSet<Vec<u64>> = BTreeSet::new();
    for t in &trivalent {
        let k = t.splits.len();
        for sub in 0u32..(1 << k) {
            let s: Vec<u64> = t
                .splits
                .iter()
                .enumerate()
                .filter(|(i, _)| sub >> i & 1 == 1)
                .map(|(_, &m)| m)
                .collect();
            all.insert(s);
        }
    }
    Ok(all
        .into_iter()
        .map(|splits| TreeType { n, splits })
        .collect())
}

/// A tree type together with a positive length for each split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedAbstractCurve {
    tree: TreeType,
    lengths: Vec<Rat>,
}

impl MarkedAbstractCurve {
    /// Lengths are aligned with `tree.splits()` and must be positive.
    pub fn new(tree: TreeType, lengths: Vec<Rat>) -> MarkedAbstractCurve {
        assert_eq!(
            lengths.len(),
            tree.splits.len(),
            "one length per split is required"
        );
        assert!(
            lengths.iter().all(|l| l > &Rat::zero()),
            "edge lengths must be positive"
        );
        MarkedAbstractCurve { tree, lengths }
    }

    pub fn tree(&self) -> &TreeType {
        &self.tree
    }

    pub fn lengths(&self) -> &[Rat] {
        &self.lengths
    }

    /// Length of the split given by either of its sides.
    pub fn length(&self, mask: u64) -> Option<&Rat> {
        let side = canonical_side(mask, self.tree.n);
        let i = self.tree.splits.binary_search(&side).ok()?;
        Some(&self.lengths[i])
    }

    /// Distances between the labeled ends, as the vector of pair
    /// coordinates: the entry at `{i, j}` sums the lengths of the
    /// splits separating `i` from `j`.
    pub fn dist_vector(&self) -> RatVec {
        let n = self.tree.n;
        let mut out = vec![Rat::zero(); n * (n - 1) / 2];
        for (mask, l) in self.tree.splits.iter().zip(&self.lengths) {
            for i in 0..n {
                for j in i + 1..n {
                    if (mask >> i ^ mask >> j) & 1 == 1 {
                        out[pair_index(n, i, j)] += l;
                    }
                }
            }
        }
        out
    }
}
