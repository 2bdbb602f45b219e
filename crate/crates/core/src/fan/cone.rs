//! Rational polyhedral cones with canonical dual descriptions.
//!
//! A cone stores extreme rays (canonicalized modulo its lineality space),
//! the lineality lattice, the saturated lattice of forms vanishing on its
//! span, and an irredundant set of facet forms. All fields are canonical:
//! two cones are equal as point sets iff they are equal as values.

use crate::fan::dd::{cone_dd, dual_dd};
use crate::linalg::{
    canonical_ray, dot_int, dot_int_rat, is_zero_vec, rank_int, saturate, to_rat_vec, IntMat,
    IntVec, Lattice, Rat, RatVec,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cone {
    ambient_rank: usize,
    dim: usize,
    rays: Vec<IntVec>,
    lineality: Lattice,
    equalities: Vec<IntVec>,
    facet_forms: Vec<IntVec>,
    span_lattice: Lattice,
}

impl Cone {
    /// `{Σ λᵢ gᵢ : λᵢ ≥ 0}`. The empty list gives the origin cone.
    pub fn from_generators(gens: &[IntVec], ambient_rank: usize) -> Cone {
        for g in gens {
            assert_eq!(g.len(), ambient_rank, "generator length mismatch");
        }
        Cone::from_rays_and_lines(gens, &[], ambient_rank)
    }

    /// Cone generated by rays together with full lines.
    pub fn from_rays_and_lines(rays: &[IntVec], lines: &[IntVec], ambient_rank: usize) -> Cone {
        let dual = dual_dd(ambient_rank, rays, lines);
        let nonzero = rays.len() + lines.len()
            == rays.iter().chain(lines).filter(|v| !is_zero_vec(v)).count();
        let independent = nonzero && {
            let all: Vec<IntVec> = rays.iter().chain(lines).cloned().collect();
            let n = all.len();
            n <= ambient_rank && rank_int(&IntMat::from_rows(all, ambient_rank)) == n
        };
        if independent {
            return Cone::assemble(
                ambient_rank,
                lines.to_vec(),
                rays.to_vec(),
                dual.lineality,
                dual.rays,
            );
        }
        let e = dual.lineality.clone();
        let g = dual.rays.clone();
        let primal = cone_dd(ambient_rank, &e, &g);
        Cone::assemble(ambient_rank, primal.lineality, primal.rays, dual.lineality, dual.rays)
    }

    /// `{x : e·x = 0, g·x ≥ 0}`.
    pub fn from_halfspaces(
        equalities: &[IntVec],
        inequalities: &[IntVec],
        ambient_rank: usize,
    ) -> Cone {
        let primal = cone_dd(ambient_rank, equalities, inequalities);
        let dual = dual_dd(ambient_rank, &primal.rays, &primal.lineality);
        Cone::assemble(ambient_rank, primal.lineality, primal.rays, dual.lineality, dual.rays)
    }

    /// The whole space as a cone.
    pub fn full_space(ambient_rank: usize) -> Cone {
        Cone::from_halfspaces(&[], &[], ambient_rank)
    }

    /// The origin cone.
    pub fn origin(ambient_rank: usize) -> Cone {
        Cone::from_generators(&[], ambient_rank)
    }

    /// canonicalizes raw double-description output into stored fields
    fn assemble(
        ambient_rank: usize,
        lin_raw: Vec<IntVec>,
        rays_raw: Vec<IntVec>,
        eq_raw: Vec<IntVec>,
        facets_raw: Vec<IntVec>,
    ) -> Cone {
        let lineality = saturate(&lin_raw, ambient_rank);
        let eq_lattice = saturate(&eq_raw, ambient_rank);
        let equalities = eq_lattice.basis_rows();
        let lin_basis = lineality.basis_rows();

        let mut rays: Vec<IntVec> = rays_raw
            .iter()
            .map(|r| canonical_ray(r, &lin_basis).expect("extreme ray outside the lineality"))
            .collect();
        rays.sort();
        rays.dedup();

        let mut facet_forms: Vec<IntVec> = facets_raw
            .iter()
            .map(|g| canonical_ray(g, &equalities).expect("facet form independent of equalities"))
            .collect();
        facet_forms.sort();
        facet_forms.dedup();

        let dim = ambient_rank - equalities.len();
        let mut span_gens = rays.clone();
        span_gens.extend(lin_basis);
        let span_lattice = saturate(&span_gens, ambient_rank);
        debug_assert_eq!(span_lattice.rank(), dim);

        Cone {
            ambient_rank,
            dim,
            rays,
            lineality,
            equalities,
            facet_forms,
            span_lattice,
        }
    }

    /// face of `self` spanned by a subset of its rays (rays must be tight
    /// at a common set of facet forms; callers guarantee this)
    pub(crate) fn face_from_rays(&self, face_rays: Vec<IntVec>) -> Cone {
        let lin_basis = self.lineality.basis_rows();
        let dual = dual_dd(self.ambient_rank, &face_rays, &lin_basis);
        Cone::assemble(self.ambient_rank, lin_basis, face_rays, dual.lineality, dual.rays)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// extreme rays modulo lineality, canonical and sorted
    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &Lattice {
        &self.lineality
    }

    /// saturated lattice of integral points in the cone's span
    pub fn span_lattice(&self) -> &Lattice {
        &self.span_lattice
    }

    /// forms vanishing on the cone (Hermite basis of a saturated lattice)
    pub fn equalities(&self) -> &[IntVec] {
        &self.equalities
    }

    /// irredundant facet forms, canonical modulo the equalities
    pub fn facet_forms(&self) -> &[IntVec] {
        &self.facet_forms
    }

    /// rays plus a lineality basis and its negation: a generator list whose
    /// nonnegative span is the cone
    pub fn generators(&self) -> Vec<IntVec> {
        let mut gens = self.rays.clone();
        for b in self.lineality.basis_rows() {
            gens.push(b.iter().map(|x| -x).collect());
            gens.push(b);
        }
        gens
    }

    pub fn is_simplicial(&self) -> bool {
        self.lineality.rank() == 0 && self.rays.len() == self.dim
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        self.equalities.iter().all(|e| dot_int(e, p).is_zero())
            && self.facet_forms.iter().all(|g| !dot_int(g, p).is_negative())
    }

    pub fn contains_rat(&self, p: &[Rat]) -> bool {
        self.equalities.iter().all(|e| dot_int_rat(e, p).is_zero())
            && self.facet_forms.iter().all(|g| !dot_int_rat(g, p).is_negative())
    }

    /// strict version of membership: all facet forms positive
    pub fn relative_interior_contains(&self, p: &[Rat]) -> bool {
        self.equalities.iter().all(|e| dot_int_rat(e, p).is_zero())
            && self.facet_forms.iter().all(|g| dot_int_rat(g, p).is_positive())
    }

    /// an integral point in the relative interior (the ray sum; the origin
    /// for a pure lineality space)
    pub fn relative_interior_point(&self) -> IntVec {
        let mut p = vec![BigInt::zero(); self.ambient_rank];
        for r in &self.rays {
            for (pi, ri) in p.iter_mut().zip(r) {
                *pi += ri;
            }
        }
        p
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        let eq: Vec<IntVec> = self
            .equalities
            .iter()
            .chain(&other.equalities)
            .cloned()
            .collect();
        let ineq: Vec<IntVec> = self
            .facet_forms
            .iter()
            .chain(&other.facet_forms)
            .cloned()
            .collect();
        Cone::from_halfspaces(&eq, &ineq, self.ambient_rank)
    }

    /// ray subsets spanning each facet (with the shared lineality)
    pub(crate) fn facet_ray_sets(&self) -> Vec<Vec<IntVec>> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for g in &self.facet_forms {
            let tight: Vec<IntVec> = self
                .rays
                .iter()
                .filter(|r| dot_int(g, r).is_zero())
                .cloned()
                .collect();
            if seen.insert(tight.clone()) {
                out.push(tight);
            }
        }
        out
    }

    pub fn facets(&self) -> Vec<Cone> {
        self.facet_ray_sets()
            .into_iter()
            .map(|rs| self.face_from_rays(rs))
            .collect()
    }

    /// all faces, including the cone itself and its minimal face
    pub fn faces(&self) -> Vec<Cone> {
        let mut seen: BTreeMap<Vec<IntVec>, Cone> = BTreeMap::new();
        let mut queue = vec![self.clone()];
        seen.insert(self.rays.clone(), self.clone());
        while let Some(c) = queue.pop() {
            for rs in c.facet_ray_sets() {
                if seen.contains_key(&rs) {
                    continue;
                }
                let face = self.face_from_rays(rs.clone());
                seen.insert(rs, face.clone());
                queue.push(face);
            }
        }
        seen.into_values().collect()
    }

    /// exact face test: lineality must match and the rays must be the
    /// tight-ray set of the facet forms vanishing on `self`
    pub fn is_face_of(&self, other: &Cone) -> bool {
        if self.ambient_rank != other.ambient_rank
            || self.lineality != other.lineality
            || !other.contains_cone(self)
        {
            return false;
        }
        let gens = self.generators();
        let tight_forms: Vec<&IntVec> = other
            .facet_forms
            .iter()
            .filter(|g| gens.iter().all(|v| dot_int(g, v).is_zero()))
            .collect();
        let mut tight_rays: Vec<IntVec> = other
            .rays
            .iter()
            .filter(|r| tight_forms.iter().all(|g| dot_int(g, r).is_zero()))
            .cloned()
            .collect();
        tight_rays.sort();
        tight_rays == self.rays
    }

    /// direct product, embedding the factors side by side
    pub fn product(&self, other: &Cone) -> Cone {
        let n = self.ambient_rank + other.ambient_rank;
        let left = |v: &IntVec| -> IntVec {
            let mut w = v.clone();
            w.extend(std::iter::repeat_with(BigInt::zero).take(other.ambient_rank));
            w
        };
        let right = |v: &IntVec| -> IntVec {
            let mut w: IntVec = std::iter::repeat_with(BigInt::zero)
                .take(self.ambient_rank)
                .collect();
            w.extend(v.iter().cloned());
            w
        };
        let mut rays: Vec<IntVec> = self.rays.iter().map(&left).collect();
        rays.extend(other.rays.iter().map(&right));
        rays.sort();
        let mut lin: Vec<IntVec> = self.lineality.basis_rows().iter().map(&left).collect();
        lin.extend(other.lineality.basis_rows().iter().map(&right));
        let mut equalities: Vec<IntVec> = self.equalities.iter().map(&left).collect();
        equalities.extend(other.equalities.iter().map(&right));
        let mut facet_forms: Vec<IntVec> = self.facet_forms.iter().map(&left).collect();
        facet_forms.extend(other.facet_forms.iter().map(&right));
        facet_forms.sort();
        let mut span: Vec<IntVec> = self.span_lattice.basis_rows().iter().map(&left).collect();
        span.extend(other.span_lattice.basis_rows().iter().map(&right));
        let eq_lattice = Lattice::from_generators(&equalities, n);
        Cone {
            ambient_rank: n,
            dim: self.dim + other.dim,
            rays,
            lineality: Lattice::from_generators(&lin, n),
            equalities: eq_lattice.basis_rows(),
            facet_forms,
            span_lattice: Lattice::from_generators(&span, n),
        }
    }

    /// rational relative interior point as exact rationals
    pub fn relative_interior_point_rat(&self) -> RatVec {
        to_rat_vec(&self.relative_interior_point())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_vec, rat_vec};

    #[test]
    fn origin_cone() {
        let c = Cone::from_generators(&[], 2);
        assert_eq!(c.dim(), 0);
        assert!(c.rays().is_empty());
        assert_eq!(c.lineality().rank(), 0);
        assert!(c.contains(&int_vec(&[0, 0])));
        assert!(!c.contains(&int_vec(&[1, 0])));
    }

    #[test]
    fn quadrant() {
        let c = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.rays(), &[int_vec(&[0, 1]), int_vec(&[1, 0])]);
        assert!(c.is_simplicial());
        assert!(c.contains(&int_vec(&[3, 5])));
        assert!(!c.contains(&int_vec(&[-1, 5])));
        assert_eq!(c.facet_forms().len(), 2);
    }

    #[test]
    fn halfplane_contains_a_line() {
        let c = Cone::from_generators(
            &[int_vec(&[1, 0]), int_vec(&[-1, 0]), int_vec(&[0, 1])],
            2,
        );
        assert_eq!(c.dim(), 2);
        assert_eq!(c.lineality().rank(), 1);
        assert_eq!(c.rays(), &[int_vec(&[0, 1])]);
        assert!(!c.is_simplicial());
        assert!(c.contains(&int_vec(&[-7, 0])));
        assert!(!c.contains(&int_vec(&[0, -1])));
    }

    #[test]
    fn round_trip_generators() {
        let cones = vec![
            Cone::from_generators(&[int_vec(&[2, 1]), int_vec(&[1, 2])], 2),
            Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[-1, 0]), int_vec(&[0, 1])], 2),
            Cone::from_generators(&[int_vec(&[1, 1, 1])], 3),
            Cone::full_space(3),
            Cone::origin(2),
        ];
        for c in cones {
            let back = Cone::from_generators(&c.generators(), c.ambient_rank());
            assert_eq!(c, back);
        }
    }

    #[test]
    fn canonical_across_descriptions() {
        // same halfplane from generators and from halfspaces
        let a = Cone::from_generators(
            &[int_vec(&[1, 0]), int_vec(&[-1, 0]), int_vec(&[0, 1])],
            2,
        );
        let b = Cone::from_halfspaces(&[], &[int_vec(&[0, 1])], 2);
        assert_eq!(a, b);
        // scaled forms give the same cone
        let c = Cone::from_halfspaces(&[], &[int_vec(&[0, 7])], 2);
        assert_eq!(a, c);
    }

    #[test]
    fn face_counts() {
        let quadrant = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2);
        assert_eq!(quadrant.faces().len(), 4);
        let origin = Cone::origin(2);
        assert_eq!(origin.faces().len(), 1);
        let halfplane =
            Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[-1, 0]), int_vec(&[0, 1])], 2);
        let faces = halfplane.faces();
        assert_eq!(faces.len(), 2);
        // the minimal face is the x-axis line, not the origin
        let line = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[-1, 0])], 2);
        assert!(faces.contains(&line));
    }

    #[test]
    fn simplicial_face_count_is_two_to_dim() {
        let c = Cone::from_generators(
            &[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0]), int_vec(&[0, 0, 1])],
            3,
        );
        assert_eq!(c.faces().len(), 8);
        let skew = Cone::from_generators(
            &[int_vec(&[1, 0, 0]), int_vec(&[1, 2, 0]), int_vec(&[1, 1, 3])],
            3,
        );
        assert_eq!(skew.faces().len(), 8);
    }

    // brute-force face oracle: every subset of facet forms, deduplicated
    fn faces_oracle(c: &Cone) -> Vec<Cone> {
        let forms = c.facet_forms().to_vec();
        let mut out: Vec<Cone> = Vec::new();
        for mask in 0..(1u32 << forms.len()) {
            let eqs: Vec<IntVec> = forms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, f)| f.clone())
                .chain(c.equalities().iter().cloned())
                .collect();
            let face = Cone::from_halfspaces(&eqs, &forms, c.ambient_rank());
            if !out.contains(&face) {
                out.push(face);
            }
        }
        out
    }

    #[test]
    fn faces_match_subset_oracle() {
        let cones = vec![
            Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2),
            Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[-1, 0]), int_vec(&[0, 1])], 2),
            Cone::from_generators(
                &[
                    int_vec(&[1, 0, 0]),
                    int_vec(&[0, 1, 0]),
                    int_vec(&[1, 0, 1]),
                    int_vec(&[0, 1, 1]),
                ],
                3,
            ),
        ];
        for c in cones {
            let mut got = c.faces();
            let mut want = faces_oracle(&c);
            got.sort();
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn intersect_cones() {
        let quadrant = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2);
        let upper = Cone::from_halfspaces(&[], &[int_vec(&[-1, 1])], 2);
        let w = quadrant.intersect(&upper);
        assert_eq!(w.dim(), 2);
        assert_eq!(w.rays(), &[int_vec(&[0, 1]), int_vec(&[1, 1])]);
    }

    #[test]
    fn face_relation() {
        let quadrant = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2);
        let ray = Cone::from_generators(&[int_vec(&[1, 0])], 2);
        let diag = Cone::from_generators(&[int_vec(&[1, 1])], 2);
        assert!(ray.is_face_of(&quadrant));
        assert!(!diag.is_face_of(&quadrant));
        assert!(quadrant.is_face_of(&quadrant));
        assert!(Cone::origin(2).is_face_of(&quadrant));
        assert!(!quadrant.is_face_of(&ray));
    }

    #[test]
    fn product_of_cones() {
        let quadrant = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2);
        let line = Cone::from_generators(&[int_vec(&[1]), int_vec(&[-1])], 1);
        let p = quadrant.product(&line);
        assert_eq!(p.ambient_rank(), 3);
        assert_eq!(p.dim(), 3);
        assert_eq!(p.lineality().rank(), 1);
        assert_eq!(p.rays().len(), 2);
        // matches the ground-up construction
        let direct = Cone::from_generators(
            &[
                int_vec(&[1, 0, 0]),
                int_vec(&[0, 1, 0]),
                int_vec(&[0, 0, 1]),
                int_vec(&[0, 0, -1]),
            ],
            3,
        );
        assert_eq!(p, direct);
    }

    #[test]
    fn relative_interior() {
        let quadrant = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2);
        let p = quadrant.relative_interior_point_rat();
        assert!(quadrant.relative_interior_contains(&p));
        assert!(!quadrant.relative_interior_contains(&rat_vec(&[1, 0])));
        assert!(quadrant.contains_rat(&rat_vec(&[1, 0])));
        let ray = Cone::from_generators(&[int_vec(&[1, 2])], 2);
        assert!(ray.relative_interior_contains(&rat_vec(&[1, 2])));
        assert!(!ray.relative_interior_contains(&rat_vec(&[0, 0])));
    }

    #[test]
    fn span_lattice_is_saturated() {
        let c = Cone::from_generators(&[int_vec(&[2, 0]), int_vec(&[0, 2])], 2);
        assert_eq!(c.span_lattice(), &Lattice::standard(2));
        let ray = Cone::from_generators(&[int_vec(&[2, 4])], 2);
        assert_eq!(ray.span_lattice().basis_rows(), vec![int_vec(&[1, 2])]);
    }
}
