//! Integral charts for the quotient of pair space by the pair-sum map.
//!
//! Distance vectors of `n`-marked curves live in `R^(n(n-1)/2)`, one
//! coordinate per pair of labels, but only matter modulo the image of
//! `phi(a) = (a_i + a_j)_{i<j}`. The chart fixes a set of pivot pairs
//! whose coordinates can always be cleared by a unique `phi` shift and
//! keeps the corrected remaining coordinates. The split vectors span a
//! full-rank lattice in the chart; their coordinates in a Hermite basis
//! of that lattice are the integral coordinates used by the moduli fans.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::linalg::{
    lcm_denoms, rank_int, solve_affine, to_rat_vec, Int, IntMat, IntVec, Lattice, Rat, RatMat,
    RatVec,
};

use super::tree::{canonical_side, full_mask};
use super::{pair_index, ModuliError};

/// The matrix of `phi`: row `{i, j}` is `e_i + e_j`.
fn phi_matrix(n: usize) -> IntMat {
    let mut rows = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut row = vec![Int::zero(); n];
            row[i] = Int::from(1);
            row[j] = Int::from(1);
            rows.push(row);
        }
    }
    IntMat::from_rows(rows, n)
}

/// 0/1 vector with ones at the pairs separated by the split.
pub(crate) fn raw_split_vector(n: usize, side: u64) -> IntVec {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(Int::from((side >> i ^ side >> j) & 1));
        }
    }
    out
}

/// Distance vector of the two-vertex tree with unit edge length whose
/// bounded edge cuts the split `mask`: the pair vector representing the
/// split class. Either side of the split gives the same vector.
pub fn split_vector(n: usize, mask: u64) -> Result<IntVec, ModuliError> {
    if n < 3 {
        return Err(ModuliError::TooFewLabels { need: 3, got: n });
    }
    let full = full_mask(n);
    if mask & !full != 0 {
        return Err(ModuliError::BadSplit { n, mask });
    }
    let k = mask.count_ones() as usize;
    if k < 2 || k > n - 2 {
        return Err(ModuliError::BadSplit { n, mask });
    }
    Ok(raw_split_vector(n, mask))
}

/// Restriction of a pair vector on `n` labels to the pairs within
/// `keep` (ascending), reindexed as pairs of `keep.len()` labels.
pub(crate) fn restrict_pairs(x: &[Rat], n: usize, keep: &[usize]) -> RatVec {
    let k = keep.len();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            out.push(x[pair_index(n, keep[a], keep[b])].clone());
        }
    }
    out
}

pub(crate) fn integral_vec(v: &[Rat]) -> Option<IntVec> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

/// Chart of the quotient space for curves with `n` labeled ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QnSpace {
    n: usize,
    pivots: Vec<usize>,
    free: Vec<usize>,
    inv_pivots: RatMat,
    phi_free: RatMat,
    basis: Vec<RatVec>,
    basis_cols: RatMat,
    classes: BTreeMap<u64, IntVec>,
}

impl QnSpace {
    pub fn new(n: usize) -> Result<QnSpace, ModuliError> {
        if n < 3 {
            return Err(ModuliError::TooFewLabels { need: 3, got: n });
        }
        assert!(n <= 64, "labels are stored in a 64-bit mask");
        let m = n * (n - 1) / 2;
        let phi = phi_matrix(n);
        let mut pivots = Vec::with_capacity(n);
        let mut rows: Vec<IntVec> = Vec::with_capacity(n);
        for p in 0..m {
            if pivots.len() == n {
                break;
            }
            rows.push(phi.row_vec(p));
            if rank_int(&IntMat::from_rows(rows.clone(), n)) == rows.len() {
                pivots.push(p);
            } else {
                rows.pop();
            }
        }
        assert_eq!(pivots.len(), n, "the pair-sum map has full rank");
        let free: Vec<usize> = (0..m).filter(|p| !pivots.contains(p)).collect();
        let phi_p = IntMat::from_rows(rows, n).to_rat();
        let mut inv_cols: Vec<RatVec> = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![Rat::zero(); n];
            e[k] = Rat::from_integer(Int::from(1));
            let (c, _) = solve_affine(&phi_p, &e).expect("the pivot block is invertible");
            inv_cols.push(c);
        }
        let inv_pivots = RatMat::from_rows(
            (0..n)
                .map(|i| (0..n).map(|k| inv_cols[k][i].clone()).collect())
                .collect(),
            n,
        );
        let phi_free = IntMat::from_rows(free.iter().map(|&p| phi.row_vec(p)).collect(), n).to_rat();
        let project = |x: &[Rat]| -> RatVec {
            let x_piv: RatVec = pivots.iter().map(|&p| x[p].clone()).collect();
            let t = inv_pivots.mul_vec(&x_piv);
            let corr = phi_free.mul_vec(&t);
            free.iter()
                .zip(&corr)
                .map(|(&p, c)| &x[p] - c)
                .collect()
        };
        for k in 0..n {
            let image = phi.col_vec(k);
            assert!(
                project(&to_rat_vec(&image)).iter().all(|x| x.is_zero()),
                "the chart must kill pair-sum shifts"
            );
        }
        let mut sides = Vec::new();
        if n >= 4 {
            let mut side = 1u64;
            while side <= full_mask(n) {
                let k = side.count_ones() as usize;
                if k >= 2 && k <= n - 2 {
                    sides.push(side);
                }
                side += 2;
            }
        }
        let projs: Vec<RatVec> = sides
            .iter()
            .map(|&s| project(&to_rat_vec(&raw_split_vector(n, s))))
            .collect();
        let mut scale = Int::from(1);
        for p in &projs {
            let l = lcm_denoms(p);
            scale = num_integer::lcm(scale, l);
        }
        let scaled: Vec<IntVec> = projs
            .iter()
            .map(|p| p.iter().map(|x| (x * &scale).to_integer()).collect())
            .collect();
        let lat = Lattice::from_generators(&scaled, free.len());
        assert_eq!(lat.rank(), free.len(), "the split classes span the chart");
        let scale_rat = Rat::from_integer(scale);
        let basis: Vec<RatVec> = lat
            .basis_rows()
            .into_iter()
            .map(|row| row.iter().map(|x| Rat::from_integer(x.clone()) / &scale_rat).collect())
            .collect();
        let basis_cols = RatMat::from_rows(
            (0..free.len())
                .map(|i| basis.iter().map(|b: &RatVec| b[i].clone()).collect())
                .collect(),
            basis.len(),
        );
        let classes: BTreeMap<u64, IntVec> = sides
            .iter()
            .zip(&scaled)
            .map(|(&s, v)| {
                let c = lat
                    .coordinates(v)
                    .expect("split vectors lie in the lattice they generate");
                (s, c)
            })
            .collect();
        Ok(QnSpace {
            n,
            pivots,
            free,
            inv_pivots,
            phi_free,
            basis,
            basis_cols,
            classes,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of pair coordinates of the ambient space.
    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Dimension of the quotient.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Pair-sum vector `(a_i + a_j)_{i<j}`.
    pub fn phi(&self, a: &[Rat]) -> RatVec {
        assert_eq!(a.len(), self.n, "one coordinate per label is required");
        let mut out = Vec::with_capacity(self.pair_count());
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(&a[i] + &a[j]);
            }
        }
        out
    }

    /// Chart coordinates of a pair vector; kills exactly the pair-sum
    /// shifts.
    pub fn project(&self, x: &[Rat]) -> RatVec {
        assert_eq!(x.len(), self.pair_count(), "one coordinate per pair is required");
        let x_piv: RatVec = self.pivots.iter().map(|&p| x[p].clone()).collect();
        let t = self.inv_pivots.mul_vec(&x_piv);
        let corr = self.phi_free.mul_vec(&t);
        self.free
            .iter()
            .zip(&corr)
            .map(|(&p, c)| &x[p] - c)
            .collect()
    }

    /// Coordinates of the class of a pair vector in the lattice basis.
    pub fn lambda_coords(&self, x: &[Rat]) -> RatVec {
        let proj = self.project(x);
        if self.basis.is_empty() {
            return Vec::new();
        }
        solve_affine(&self.basis_cols, &proj)
            .expect("the chart basis is invertible")
            .0
    }

    /// A pair vector representing the class with the given lattice
    /// coordinates: zero at the pivot pairs.
    pub fn representative(&self, lambda: &[Rat]) -> RatVec {
        assert_eq!(lambda.len(), self.rank(), "one coordinate per basis vector");
        let mut chart = vec![Rat::zero(); self.free.len()];
        for (l, b) in lambda.iter().zip(&self.basis) {
            for (c, x) in chart.iter_mut().zip(b) {
                *c += l * x;
            }
        }
        let mut out = vec![Rat::zero(); self.pair_count()];
        for (&p, c) in self.free.iter().zip(chart) {
            out[p] = c;
        }
        out
    }

    /// Lattice coordinates of the class of a split, by either side.
    pub fn split_class(&self, mask: u64) -> Result<&IntVec, ModuliError> {
        let full = full_mask(self.n);
        if mask & !full != 0 {
            return Err(ModuliError::BadSplit { n: self.n, mask });
        }
        let side = canonical_side(mask, self.n);
        let k = side.count_ones() as usize;
        if k < 2 || k > self.n - 2 {
            return Err(ModuliError::BadSplit { n: self.n, mask });
        }
        Ok(self
            .classes
            .get(&side)
            .expect("every proper split has a class"))
    }

    /// All split classes, keyed by canonical side, sorted by mask.
    pub fn split_classes(&self) -> impl Iterator<Item = (u64, &IntVec)> {
        self.classes.iter().map(|(&s, v)| (s, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_vec, rat_vec};
    use crate::moduli::{MarkedAbstractCurve, TreeType};

    #[test]
    fn chart_ranks_and_class_counts() {
        for (n, rank, count) in [(3, 0, 0), (4, 2, 3), (5, 5, 10), (6, 9, 25)] {
            let q = QnSpace::new(n).unwrap();
            assert_eq!(q.rank(), rank);
            assert_eq!(q.split_classes().count(), count);
        }
        assert_eq!(
            QnSpace::new(2),
            Err(ModuliError::TooFewLabels { need: 3, got: 2 })
        );
    }

    #[test]
    fn the_three_split_classes_of_four_labels() {
        let q = QnSpace::new(4).unwrap();
        assert_eq!(q.split_class(0b0011).unwrap(), &int_vec(&[0, -1]));
        assert_eq!(q.split_class(0b0101).unwrap(), &int_vec(&[-1, 0]));
        assert_eq!(q.split_class(0b1001).unwrap(), &int_vec(&[1, 1]));
    }

    #[test]
    fn the_four_label_classes_sum_to_zero() {
        let q = QnSpace::new(4).unwrap();
        let mut sum = vec![Int::zero(); 2];
        for (_, c) in q.split_classes() {
            for (s, x) in sum.iter_mut().zip(c) {
                *s += x;
            }
        }
        assert_eq!(sum, int_vec(&[0, 0]));
        // the raw sum is a pair-sum shift
        let mut raw = vec![Rat::zero(); 6];
        for side in [0b0011u64, 0b0101, 0b1001] {
            for (r, x) in raw.iter_mut().zip(raw_split_vector(4, side)) {
                *r += Rat::from_integer(x);
            }
        }
        assert!(q.project(&raw).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn complementary_sides_give_the_same_class() {
        let q = QnSpace::new(5).unwrap();
        assert_eq!(q.split_class(0b01100), q.split_class(0b10011));
        let a = q.project(&to_rat_vec(&raw_split_vector(5, 0b01100)));
        let b = q.project(&to_rat_vec(&raw_split_vector(5, 0b10011)));
        assert_eq!(a, b);
    }

    #[test]
    fn pair_sum_shifts_project_to_zero() {
        let q = QnSpace::new(5).unwrap();
        let a = rat_vec(&[3, -1, 4, 1, -5]);
        let shifted = q.phi(&a);
        assert!(q.project(&shifted).iter().all(|x| x.is_zero()));
        assert!(q.lambda_coords(&shifted).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn representatives_round_trip_through_the_chart() {
        let q = QnSpace::new(5).unwrap();
        let lambda = rat_vec(&[2, -3, 1, 0, 7]);
        let rep = q.representative(&lambda);
        assert_eq!(q.lambda_coords(&rep), lambda);
    }

    #[test]
    fn curve_classes_expand_in_split_classes() {
        let q = QnSpace::new(5).unwrap();
        let t = TreeType::new(5, [0b00011, 0b00111]).unwrap();
        let c = MarkedAbstractCurve::new(t.clone(), rat_vec(&[2, 3]));
        let lambda = q.lambda_coords(&c.dist_vector());
        let mut expected = vec![Rat::zero(); q.rank()];
        for (mask, l) in t.splits().iter().zip(c.lengths()) {
            for (e, x) in expected.iter_mut().zip(q.split_class(*mask).unwrap()) {
                *e += l * &Rat::from_integer(x.clone());
            }
        }
        assert_eq!(lambda, expected);
    }

    #[test]
    fn split_vectors_are_side_symmetric_and_sum_into_the_kernel() {
        assert_eq!(
            split_vector(5, 0b10011).unwrap(),
            split_vector(5, 0b01100).unwrap()
        );
        // for four labels the three split vectors sum to a pair-sum shift
        let mut sum = vec![Rat::zero(); 6];
        for mask in [0b0011u64, 0b0101, 0b1001] {
            for (s, x) in sum.iter_mut().zip(split_vector(4, mask).unwrap()) {
                *s += Rat::from_integer(x);
            }
        }
        assert!(solve_affine(&phi_matrix(4).to_rat(), &sum).is_some());
        assert_eq!(
            split_vector(4, 0b0001),
            Err(ModuliError::BadSplit { n: 4, mask: 1 })
        );
    }

    #[test]
    fn improper_masks_have_no_class() {
        let q = QnSpace::new(4).unwrap();
        assert_eq!(
            q.split_class(0b0001),
            Err(ModuliError::BadSplit { n: 4, mask: 1 })
        );
        assert_eq!(
            q.split_class(0b10011),
            Err(ModuliError::BadSplit { n: 4, mask: 0b10011 })
        );
    }
}
