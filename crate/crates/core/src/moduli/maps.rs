//! Parametrized marked curves: degrees, edge directions, the
//! stable-maps fan, and the evaluation and four-end projection
//! morphisms.
//!
//! A parametrized curve in `R^r` is an abstract curve with
//! `N = n + #degree` ends together with a position: ends `1..=n` are
//! contracted to points, end `n + k` leaves toward the k-th degree
//! direction. The vertex balancing condition then forces a unique
//! direction on every bounded edge, so a curve is determined by its
//! tree type, edge lengths, and the position of the vertex at the
//! first end. The moduli fan is the product of the abstract moduli fan
//! with the `R^r` of positions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::fan::Fan;
use crate::linalg::{int_vec, is_zero_vec, rat, Int, IntMat, IntVec, Rat};
use crate::morphism::FanMorphism;
use crate::tropical::WeightedFan;

use super::m0n::build_m0n;
use super::qn::{integral_vec, restrict_pairs, QnSpace};
use super::tree::{full_mask, TreeType};
use super::{pair_index, ModuliError};

/// The multiset of directions of the non-contracted ends of a curve in
/// `R^r`: nonzero integer vectors summing to zero. Entry order is
/// kept; end `n + k` (zero based) points along `entries[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degree {
    r: usize,
    entries: Vec<IntVec>,
}

impl Degree {
    pub fn new(r: usize, entries: Vec<IntVec>) -> Result<Degree, ModuliError> {
        let mut sum = vec![Int::zero(); r];
        for (index, e) in entries.iter().enumerate() {
            if e.len() != r {
                return Err(ModuliError::WrongLength {
                    expected: r,
                    got: e.len(),
                });
            }
            if is_zero_vec(e) {
                return Err(ModuliError::ZeroDirection { index });
            }
            for (s, x) in sum.iter_mut().zip(e) {
                *s += x;
            }
        }
        if !is_zero_vec(&sum) {
            return Err(ModuliError::UnbalancedDegree);
        }
        Ok(Degree { r, entries })
    }

    /// `d` ends in each of the directions `e1+e2`, `-e1`, `-e2`: plane
    /// curves of degree `d`.
    pub fn plane(d: usize) -> Degree {
        let mut entries = Vec::with_capacity(3 * d);
        for dir in [[1, 1], [-1, 0], [0, -1]] {
            for _ in 0..d {
                entries.push(int_vec(&dir));
            }
        }
        Degree::new(2, entries).expect("plane degrees are balanced")
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn entries(&self) -> &[IntVec] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Order of the group of relabelings permuting ends with equal
    /// directions: the product of the multiplicities' factorials.
    pub fn symmetry_order(&self) -> Int {
        let mut sorted = self.entries.clone();
        sorted.sort_unstable();
        let mut order = Int::one();
        let mut run = 0u64;
        for (i, e) in sorted.iter().enumerate() {
            if i > 0 && e == &sorted[i - 1] {
                run += 1;
            } else {
                run = 1;
            }
            order *= Int::from(run);
        }
        order
    }
}

/// The direction of every bounded edge of a parametrized curve,
/// oriented away from the side containing the first end, keyed by
/// canonical split side. Ends `0..n` are contracted; end `n + k`
/// points along the k-th degree entry. The assignment is the unique
/// one balancing every vertex, found by resolving edges whose far
/// subtree is already known, leaves first.
pub fn directions(tree: &TreeType, n: usize, delta: &Degree) -> BTreeMap<u64, IntVec> {
    let nn = tree.n();
    assert_eq!(
        nn,
        n + delta.len(),
        "ends must carry exactly the degree directions"
    );
    let r = delta.r();
    let full = full_mask(nn);
    let mut order: Vec<u64> = tree.splits().iter().map(|&s| s ^ full).collect();
    order.sort_unstable_by_key(|m| (m.count_ones(), *m));
    let mut resolved: BTreeMap<u64, IntVec> = BTreeMap::new();
    for &far in &order {
        let mut d = vec![Int::zero(); r];
        let mut covered = 0u64;
        let children: Vec<u64> = resolved.keys().copied().filter(|&c| c & !far == 0).collect();
        for &c in &children {
            // only edges meeting this one's far vertex count
            if children.iter().any(|&c2| c2 != c && c & !c2 == 0) {
                continue;
            }
            covered |= c;
            for (x, y) in d.iter_mut().zip(&resolved[&c]) {
                *x += y;
            }
        }
        for k in n..nn {
            if far >> k & 1 == 1 && covered >> k & 1 == 0 {
                for (x, y) in d.iter_mut().zip(&delta.entries()[k - n]) {
                    *x += y;
                }
            }
        }
        resolved.insert(far, d);
    }
    resolved.into_iter().map(|(far, d)| (far ^ full, d)).collect()
}

/// Moduli fan of parametrized curves with `n` contracted ends and the
/// given degree: the abstract moduli fan on `n + #degree` ends times
/// `R^r`, with unit weights.
pub fn stable_maps_fan(n: usize, r: usize, delta: &Degree) -> Result<WeightedFan, ModuliError> {
    if n == 0 {
        return Err(ModuliError::TooFewLabels { need: 1, got: 0 });
    }
    if delta.r() != r {
        return Err(ModuliError::WrongLength {
            expected: r,
            got: delta.r(),
        });
    }
    let nn = n + delta.len();
    if nn < 3 {
        return Err(ModuliError::TooFewLabels { need: 3, got: nn });
    }
    let base = build_m0n(nn)?.to_weighted();
    let factor = WeightedFan::with_unit_weights(Fan::full_space(r));
    Ok(base.product(&factor))
}

/// Matrix of the i-th evaluation on lattice coordinates plus position:
/// the position shifted by half the alternating pair sums against the
/// degree directions.
pub(crate) fn ev_matrix(i: usize, n: usize, space: &QnSpace, delta: &Degree) -> IntMat {
    let nn = space.n();
    debug_assert_eq!(nn, n + delta.len());
    let r = delta.r();
    let rank = space.rank();
    let half = rat(1, 2);
    let mut columns: Vec<IntVec> = Vec::with_capacity(rank + r);
    for j in 0..rank {
        let mut e = vec![Rat::zero(); rank];
        e[j] = Rat::one();
        let a = space.representative(&e);
        let mut col = vec![Rat::zero(); r];
        for k in n..nn {
            let w = (&a[pair_index(nn, 0, k)] - &a[pair_index(nn, i - 1, k)]) * &half;
            if w.is_zero() {
                continue;
            }
            for (c, d) in col.iter_mut().zip(&delta.entries()[k - n]) {
                *c += &w * &Rat::from_integer(d.clone());
            }
        }
        columns.push(integral_vec(&col).expect("evaluation preserves the lattice"));
    }
    for t in 0..r {
        let mut col = vec![Int::zero(); r];
        col[t] = Int::one();
        columns.push(col);
    }
    IntMat::from_rows(
        (0..r)
            .map(|t| columns.iter().map(|c| c[t].clone()).collect())
            .collect(),
        rank + r,
    )
}

/// Matrix of the projection to the moduli of the first four ends:
/// restrict pair vectors to pairs within the first four labels, drop
/// the position factor.
pub(crate) fn ft4_matrix(space: &QnSpace, r: usize, q4: &QnSpace) -> IntMat {
    let nn = space.n();
    let rank = space.rank();
    let mut columns: Vec<IntVec> = Vec::with_capacity(rank + r);
    for j in 0..rank {
        let mut e = vec![Rat::zero(); rank];
        e[j] = Rat::one();
        let dropped = restrict_pairs(&space.representative(&e), nn, &[0, 1, 2, 3]);
        let lam = q4.lambda_coords(&dropped);
        columns.push(integral_vec(&lam).expect("the four-end projection preserves the lattice"));
    }
    for _ in 0..r {
        columns.push(vec![Int::zero(); 2]);
    }
    IntMat::from_rows(
        (0..2)
            .map(|t| columns.iter().map(|c| c[t].clone()).collect())
            .collect(),
        rank + r,
    )
}

/// Evaluation of the i-th contracted end (1-based), as a morphism from
/// the stable-maps fan to `R^r`.
pub fn ev_morphism(i: usize, n: usize, r: usize, delta: &Degree) -> Result<FanMorphism, ModuliError> {
    assert!(i >= 1 && i <= n, "only contracted ends are evaluated");
    let source = stable_maps_fan(n, r, delta)?;
    let space = QnSpace::new(n + delta.len())?;
    let matrix = ev_matrix(i, n, &space, delta);
    let target = WeightedFan::with_unit_weights(Fan::full_space(r));
    Ok(FanMorphism::new(source, target, matrix).expect("evaluation lands in the target space"))
}

/// Projection from the stable-maps fan to the moduli fan of the first
/// four contracted ends.
pub fn ft4_morphism(n: usize, r: usize, delta: &Degree) -> Result<FanMorphism, ModuliError> {
    if n < 4 {
        return Err(ModuliError::TooFewLabels { need: 4, got: n });
    }
    let source = stable_maps_fan(n, r, delta)?;
    let space = QnSpace::new(n + delta.len())?;
    let q4 = QnSpace::new(4)?;
    let matrix = ft4_matrix(&space, r, &q4);
    let target = build_m0n(4)?.to_weighted();
    Ok(FanMorphism::new(source, target, matrix)
        .expect("tree types project into single cones of the four-end fan"))
}
