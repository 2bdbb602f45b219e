//! The moduli fans of abstract marked curves and their forgetful maps.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::fan::{Cone, Fan};
use crate::linalg::{primitive_int, rat_int, IntMat, IntVec, Rat};
use crate::morphism::FanMorphism;
use crate::tropical::MarkedFan;

use super::qn::{integral_vec, restrict_pairs, QnSpace};
use super::tree::{enumerate_tree_types, MarkedAbstractCurve, TreeType};
use super::{pair_index, ModuliError};

/// Cap on the number of maximal cones a moduli fan may assemble.
pub const MAX_MODULI_CONES: u128 = 200_000;

/// (2n-5)!!, the number of trivalent types on `n` labels.
fn trivalent_count(n: usize) -> u128 {
    let mut p = 1u128;
    let mut k = 1u128;
    while k <= (2 * n - 5) as u128 {
        p = p.saturating_mul(k);
        k += 2;
    }
    p
}

/// Moduli fan of abstract curves with `n` labeled ends, in the chart of
/// [`QnSpace`]: one cone per tree type, spanned by its split classes
/// and marked with them. The trivalent types are the maximal cones.
/// For `n = 3` this is the one-point fan in rank zero.
pub fn build_m0n(n: usize) -> Result<MarkedFan, ModuliError> {
    let space = QnSpace::new(n)?;
    let count = trivalent_count(n);
    if count > MAX_MODULI_CONES {
        return Err(ModuliError::TooLarge {
            cones: count,
            cap: MAX_MODULI_CONES,
        });
    }
    let types = enumerate_tree_types(n, false)?;
    let rank = space.rank();
    let mut cones = Vec::with_capacity(types.len());
    for t in &types {
        let gens: Vec<IntVec> = t
            .splits()
            .iter()
            .map(|&s| space.split_class(s).expect("tree splits are proper").clone())
            .collect();
        cones.push((Cone::from_generators(&gens, rank), t.is_trivalent()));
    }
    let fan = Fan::from_closed_cones_unchecked(rank, cones);
    let mut markings = BTreeMap::new();
    for (_, class) in space.split_classes() {
        let ray = primitive_int(class).expect("split classes are nonzero");
        let prev = markings.insert(ray, class.clone());
        assert!(prev.is_none(), "split classes have distinct directions");
    }
    Ok(MarkedFan::new(fan, markings))
}

/// The morphism forgetting the last end, from the moduli fan on `n`
/// labels to the one on `n - 1`, induced by restricting pair vectors
/// to the pairs avoiding the last label.
pub fn forgetful_morphism(n: usize) -> Result<FanMorphism, ModuliError> {
    if n < 5 {
        return Err(ModuliError::TooFewLabels { need: 5, got: n });
    }
    let source_space = QnSpace::new(n)?;
    let target_space = QnSpace::new(n - 1)?;
    let keep: Vec<usize> = (0..n - 1).collect();
    let mut columns = Vec::with_capacity(source_space.rank());
    for j in 0..source_space.rank() {
        let mut e = vec![Rat::zero(); source_space.rank()];
        e[j] = Rat::one();
        let dropped = restrict_pairs(&source_space.representative(&e), n, &keep);
        let lam = target_space.lambda_coords(&dropped);
        columns.push(integral_vec(&lam).expect("forgetting an end preserves the lattice"));
    }
    let rows = (0..target_space.rank())
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let matrix = IntMat::from_rows(rows, source_space.rank());
    let source = build_m0n(n)?.to_weighted();
    let target = build_m0n(n - 1)?.to_weighted();
    Ok(FanMorphism::new(source, target, matrix)
        .expect("forgetting an end maps tree types onto tree types"))
}

/// Reconstructs the abstract curve whose class has the given chart
/// coordinates, or reports that the point lies outside the moduli
/// support. The candidate length of a split is half the smallest
/// four-point excess across it, which is independent of the chosen
/// pair-vector representative; the reconstruction is verified exactly
/// before it is returned.
pub fn locate_curve(
    space: &QnSpace,
    lambda: &[Rat],
) -> Result<MarkedAbstractCurve, ModuliError> {
    let n = space.n();
    let x = space.representative(lambda);
    let at = |i: usize, j: usize| -> &Rat {
        if i < j {
            &x[pair_index(n, i, j)]
        } else {
            &x[pair_index(n, j, i)]
        }
    };
    let mut splits = Vec::new();
    let mut lengths = Vec::new();
    for (side, _) in space.split_classes() {
        let ins: Vec<usize> = (0..n).filter(|k| side >> k & 1 == 1).collect();
        let outs: Vec<usize> = (0..n).filter(|k| side >> k & 1 == 0).collect();
        let mut best: Option<Rat> = None;
        for a in 0..ins.len() {
            for b in a + 1..ins.len() {
                for c in 0..outs.len() {
                    for d in c + 1..outs.len() {
                        let (i, j, k, m) = (ins[a], ins[b], outs[c], outs[d]);
                        let v = at(i, k) + at(j, m) - at(i, j) - at(k, m);
                        let better = match &best {
                            None => true,
                            Some(cur) => &v < cur,
                        };
                        if better {
                            best = Some(v);
                        }
                    }
                }
            }
        }
        let excess = best.expect("proper splits admit a four-point check");
        if excess > Rat::zero() {
            splits.push(side);
            lengths.push(excess / rat_int(2));
        }
    }
    let tree = TreeType::new(n, splits).map_err(|_| ModuliError::NotInModuli)?;
    let curve = MarkedAbstractCurve::new(tree, lengths);
    if space.lambda_coords(&curve.dist_vector()) != lambda {
        return Err(ModuliError::NotInModuli);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::super::tree::canonical_side;
    use super::*;
    use crate::fan::{standard_l, ValidationConfig};
    use crate::linalg::{int_vec, rank_int, rat, rat_vec, solve_affine, RatMat, RatVec};
    use crate::tropical::WeightedFan;

    #[test]
    fn three_labels_give_the_one_point_fan() {
        let m = build_m0n(3).unwrap();
        assert_eq!(m.fan().ambient_rank(), 0);
        assert_eq!(m.fan().cones().len(), 1);
        assert_eq!(m.fan().dim(), 0);
        assert!(m.is_balanced());
    }

    #[test]
    fn four_labels_give_the_three_ray_fan() {
        let m = build_m0n(4).unwrap();
        assert_eq!(m.fan().ambient_rank(), 2);
        assert_eq!(m.fan().dim(), 1);
        assert_eq!(m.fan().cones().len(), 4);
        assert_eq!(m.fan().maximal_cones().count(), 3);
        let rays: BTreeSet<IntVec> = m
            .fan()
            .maximal_cones()
            .map(|c| c.rays()[0].clone())
            .collect();
        let expected: BTreeSet<IntVec> = [
            int_vec(&[0, -1]),
            int_vec(&[-1, 0]),
            int_vec(&[1, 1]),
        ]
        .into_iter()
        .collect();
        assert_eq!(rays, expected);
        for r in &rays {
            assert_eq!(m.marking(r), Some(r));
        }
        assert!(m.fan().is_simplicial());
        assert!(m.fan().is_pure());
        assert!(m.is_balanced());
        let w = m.to_weighted();
        assert!(w.weights().iter().all(|x| x.is_one()));
    }

    #[test]
    fn the_four_label_fan_is_the_standard_line_after_a_basis_change() {
        let m04 = build_m0n(4).unwrap().to_weighted();
        let line = WeightedFan::with_unit_weights(standard_l(1, 2).unwrap());
        let b = IntMat::from_i64(&[&[0, -1], &[-1, 0]]);
        let iso = FanMorphism::new(m04, line.clone(), b).unwrap();
        assert_eq!(iso.image_fan(), line);
    }

    #[test]
    fn five_label_fan_counts() {
        let m = build_m0n(5).unwrap();
        assert_eq!(m.fan().ambient_rank(), 5);
        assert_eq!(m.fan().dim(), 2);
        assert_eq!(m.fan().maximal_cones().count(), 15);
        assert_eq!(m.fan().cones().len(), 26);
        let rays = m.fan().cones().iter().filter(|c| c.dim() == 1).count();
        assert_eq!(rays, 10);
        assert!(m.fan().is_simplicial());
        assert!(m.fan().is_pure());
        assert!(m.is_balanced());
    }

    #[test]
    fn six_label_fan_is_balanced() {
        let m = build_m0n(6).unwrap();
        assert_eq!(m.fan().ambient_rank(), 9);
        assert_eq!(m.fan().dim(), 3);
        assert_eq!(m.fan().maximal_cones().count(), 105);
        assert_eq!(m.fan().cones().iter().filter(|c| c.dim() == 1).count(), 25);
        assert!(m.is_balanced());
    }

    #[test]
    fn oversized_fans_are_refused() {
        assert_eq!(
            build_m0n(10),
            Err(ModuliError::TooLarge {
                cones: 2_027_025,
                cap: MAX_MODULI_CONES
            })
        );
    }

    #[test]
    fn unchecked_assembly_matches_validated_construction() {
        for n in [4, 5] {
            let m = build_m0n(n).unwrap();
            let maximal: Vec<Cone> = m.fan().maximal_cones().cloned().collect();
            let validated = Fan::from_cones(maximal, &ValidationConfig::default()).unwrap();
            assert_eq!(&validated, m.fan());
        }
    }

    #[test]
    fn trivalent_types_embed_with_full_rank() {
        for n in [5, 6] {
            let space = QnSpace::new(n).unwrap();
            for t in enumerate_tree_types(n, true).unwrap() {
                let rows: Vec<IntVec> = t
                    .splits()
                    .iter()
                    .map(|&s| space.split_class(s).unwrap().clone())
                    .collect();
                assert_eq!(rank_int(&IntMat::from_rows(rows, space.rank())), n - 3);
            }
        }
    }

    #[test]
    fn resolution_sums_lie_on_their_codimension_one_cell() {
        for n in [5, 6] {
            let space = QnSpace::new(n).unwrap();
            let all = enumerate_tree_types(n, false).unwrap();
            let trivalent: Vec<&TreeType> = all.iter().filter(|t| t.is_trivalent()).collect();
            for tau in all.iter().filter(|t| t.splits().len() == n - 4) {
                let extras: Vec<u64> = trivalent
                    .iter()
                    .filter(|t| tau.splits().iter().all(|s| t.splits().contains(s)))
                    .map(|t| {
                        *t.splits()
                            .iter()
                            .find(|s| !tau.splits().contains(s))
                            .unwrap()
                    })
                    .collect();
                assert_eq!(extras.len(), 3);
                let mut sum = vec![Rat::zero(); space.rank()];
                for e in &extras {
                    for (s, x) in sum.iter_mut().zip(space.split_class(*e).unwrap()) {
                        *s += Rat::from_integer(x.clone());
                    }
                }
                let cols = RatMat::from_rows(
                    (0..space.rank())
                        .map(|i| {
                            tau.splits()
                                .iter()
                                .map(|&s| {
                                    Rat::from_integer(space.split_class(s).unwrap()[i].clone())
                                })
                                .collect()
                        })
                        .collect(),
                    tau.splits().len(),
                );
                let (coeffs, _) =
                    solve_affine(&cols, &sum).expect("the residue lies on the cell");
                assert!(coeffs.iter().all(|c| c >= &Rat::zero()));
            }
        }
    }

    #[test]
    fn forgetting_the_last_end_maps_split_classes() {
        let f = forgetful_morphism(5).unwrap();
        let q5 = QnSpace::new(5).unwrap();
        let q4 = QnSpace::new(4).unwrap();
        let apply = |mask: u64| f.matrix().mul_vec(q5.split_class(mask).unwrap());
        assert_eq!(apply(0b10001), int_vec(&[0, 0]));
        assert_eq!(&apply(0b10011), q4.split_class(0b0011).unwrap());
        assert_eq!(&apply(0b00011), q4.split_class(0b0011).unwrap());
        assert_eq!(
            forgetful_morphism(4),
            Err(ModuliError::TooFewLabels { need: 5, got: 4 })
        );
    }

    // combinatorial forgetting of the last label: improper splits
    // vanish, splits that collide merge their lengths
    fn forget_last(c: &MarkedAbstractCurve) -> MarkedAbstractCurve {
        let n = c.tree().n() - 1;
        let mut merged: BTreeMap<u64, Rat> = BTreeMap::new();
        for (&mask, l) in c.tree().splits().iter().zip(c.lengths()) {
            let m = canonical_side(mask & !(1 << n), n);
            let k = m.count_ones() as usize;
            if (2..=n - 2).contains(&k) {
                *merged.entry(m).or_insert_with(Rat::zero) += l;
            }
        }
        let tree = TreeType::new(n, merged.keys().copied()).unwrap();
        MarkedAbstractCurve::new(tree, merged.into_values().collect())
    }

    #[test]
    fn forgetting_commutes_with_distance_vectors() {
        let f = forgetful_morphism(5).unwrap();
        let q5 = QnSpace::new(5).unwrap();
        let q4 = QnSpace::new(4).unwrap();
        let phi4_cols = {
            let mut rows = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    let mut row = rat_vec(&[0, 0, 0, 0]);
                    row[i] = rat_int(1);
                    row[j] = rat_int(1);
                    rows.push(row);
                }
            }
            RatMat::from_rows(rows, 4)
        };
        // one curve loses a split, one curve merges two
        let cases = [
            MarkedAbstractCurve::new(
                TreeType::new(5, [0b00011, 0b00111]).unwrap(),
                vec![rat(3, 2), rat(5, 2)],
            ),
            MarkedAbstractCurve::new(
                TreeType::new(5, [0b00011, 0b10011]).unwrap(),
                vec![rat(1, 1), rat(7, 3)],
            ),
        ];
        for c in &cases {
            let forgotten = forget_last(c);
            let restricted = restrict_pairs(&c.dist_vector(), 5, &[0, 1, 2, 3]);
            let diff: RatVec = forgotten
                .dist_vector()
                .iter()
                .zip(&restricted)
                .map(|(a, b)| a - b)
                .collect();
            assert!(solve_affine(&phi4_cols, &diff).is_some());
            assert_eq!(
                f.matrix().mul_vec_rat(&q5.lambda_coords(&c.dist_vector())),
                q4.lambda_coords(&forgotten.dist_vector())
            );
        }
    }

    #[test]
    fn located_curves_round_trip() {
        let q5 = QnSpace::new(5).unwrap();
        let curve = MarkedAbstractCurve::new(
            TreeType::new(5, [0b00011, 0b00111]).unwrap(),
            vec![rat(3, 2), rat(7, 3)],
        );
        let lambda = q5.lambda_coords(&curve.dist_vector());
        assert_eq!(locate_curve(&q5, &lambda).unwrap(), curve);
        let star = MarkedAbstractCurve::new(TreeType::star(5).unwrap(), vec![]);
        let zero = vec![Rat::zero(); q5.rank()];
        assert_eq!(locate_curve(&q5, &zero).unwrap(), star);
    }

    #[test]
    fn points_off_the_support_are_rejected() {
        let q4 = QnSpace::new(4).unwrap();
        assert_eq!(
            locate_curve(&q4, &rat_vec(&[1, 2])),
            Err(ModuliError::NotInModuli)
        );
        let on_ray = locate_curve(&q4, &rat_vec(&[2, 2])).unwrap();
        assert_eq!(on_ray.tree().splits(), [0b1001]);
        assert_eq!(on_ray.lengths(), [rat_int(2)]);
        assert_eq!(
            locate_curve(&q4, &rat_vec(&[1, 0])),
            Err(ModuliError::NotInModuli)
        );
    }
}
