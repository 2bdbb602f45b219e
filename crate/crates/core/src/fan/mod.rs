//! Fans of integral polyhedral cones: face-closed collections whose
//! pairwise intersections are faces, plus the standard examples, point
//! location, products, intersections, and primitive normal vectors.

mod cone;
mod dd;

pub use cone::Cone;

use crate::linalg::{
    canonical_ray, dot_int, int, kernel_int, reduce_mod_lattice, saturate, smith_normal_form,
    IntMat, IntVec, Rat,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("cones overlap without being faces of each other (witness point {witness:?})")]
    NotAFan {
        left: Box<Cone>,
        right: Box<Cone>,
        witness: IntVec,
    },
    #[error("face is not of codimension one in the cone")]
    NotCodimOne,
    #[error("cone is not contained in any cone of the fan")]
    NotContained,
    #[error("invalid range: k = {k} must be at most n = {n}")]
    BadRange { k: usize, n: usize },
    #[error("the zero form does not define a halfspace")]
    ZeroForm,
}

/// Controls how many cone pairs the fan constructor checks exactly.
#[derive(Debug, Clone)]
pub struct ValidationConfig {
    /// exhaustive pairwise validation below this many cones
    pub exhaustive_limit: usize,
    /// number of sampled pairs above the limit
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { exhaustive_limit: 100_000, samples: 2_000, seed: 0 }
    }
}

/// A finite, face-closed set of cones whose pairwise intersections are
/// faces of both. Cones are stored sorted by dimension, then value.
#[derive(Debug, Clone)]
pub struct Fan {
    ambient_rank: usize,
    cones: Vec<Cone>,
    maximal: Vec<bool>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl Fan {
    /// Closes the input under faces, deduplicates, and validates that
    /// pairwise intersections of maximal cones are faces of both (which
    /// implies the condition for all pairs).
    pub fn from_cones(cones: Vec<Cone>, config: &ValidationConfig) -> Result<Fan, FanError> {
        assert!(!cones.is_empty(), "a fan needs at least one cone; use Fan::empty");
        let ambient_rank = cones[0].ambient_rank();
        for c in &cones {
            assert_eq!(c.ambient_rank(), ambient_rank, "mixed ambient spaces");
        }
        let mut all: HashMap<Cone, bool> = HashMap::new(); // cone -> is a proper face
        for c in &cones {
            for f in c.faces() {
                let proper = f != *c;
                let entry = all.entry(f).or_insert(false);
                *entry = *entry || proper;
            }
        }
        let mut list: Vec<(Cone, bool)> = all.into_iter().collect();
        list.sort_by(|a, b| (a.0.dim(), &a.0).cmp(&(b.0.dim(), &b.0)));
        let cones: Vec<Cone> = list.iter().map(|(c, _)| c.clone()).collect();
        let maximal: Vec<bool> = list.iter().map(|(_, proper)| !proper).collect();
        let fan = Fan { ambient_rank, cones, maximal };
        fan.validate(config)?;
        Ok(fan)
    }

    /// trusted entry for constructions that are fans by construction;
    /// still deduplicates and sorts, but skips pair validation
    pub(crate) fn from_closed_cones_unchecked(
        ambient_rank: usize,
        cones_with_maximality: Vec<(Cone, bool)>,
    ) -> Fan {
        let mut map: HashMap<Cone, bool> = HashMap::new();
        for (c, m) in cones_with_maximality {
            let entry = map.entry(c).or_insert(false);
            *entry = *entry || m;
        }
        let mut list: Vec<(Cone, bool)> = map.into_iter().collect();
        list.sort_by(|a, b| (a.0.dim(), &a.0).cmp(&(b.0.dim(), &b.0)));
        Fan {
            ambient_rank,
            cones: list.iter().map(|(c, _)| c.clone()).collect(),
            maximal: list.iter().map(|(_, m)| *m).collect(),
        }
    }

    /// fan with no cones at all (empty support)
    pub fn empty(ambient_rank: usize) -> Fan {
        Fan { ambient_rank, cones: Vec::new(), maximal: Vec::new() }
    }

    /// the fan whose only cone is the whole space
    pub fn full_space(ambient_rank: usize) -> Fan {
        Fan {
            ambient_rank,
            cones: vec![Cone::full_space(ambient_rank)],
            maximal: vec![true],
        }
    }

    fn validate(&self, config: &ValidationConfig) -> Result<(), FanError> {
        let max_idx: Vec<usize> = (0..self.cones.len()).filter(|&i| self.maximal[i]).collect();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (a, &i) in max_idx.iter().enumerate() {
            for &j in &max_idx[a + 1..] {
                pairs.push((i, j));
            }
        }
        if self.cones.len() > config.exhaustive_limit && pairs.len() > config.samples {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut sampled: Vec<(usize, usize)> = Vec::with_capacity(config.samples);
            for _ in 0..config.samples {
                sampled.push(pairs[rng.random_range(0..pairs.len())]);
            }
            pairs = sampled;
        }
        for (i, j) in pairs {
            check_pair(&self.cones[i], &self.cones[j])?;
        }
        Ok(())
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cones_of_dim(&self, d: usize) -> impl Iterator<Item = &Cone> {
        self.cones.iter().filter(move |c| c.dim() == d)
    }

    pub fn maximal_cones(&self) -> impl Iterator<Item = &Cone> {
        self.cones
            .iter()
            .zip(&self.maximal)
            .filter(|(_, m)| **m)
            .map(|(c, _)| c)
    }

    pub fn is_maximal(&self, c: &Cone) -> bool {
        self.cones
            .iter()
            .zip(&self.maximal)
            .any(|(d, m)| *m && d == c)
    }

    /// largest cone dimension; 0 for the empty fan
    pub fn dim(&self) -> usize {
        self.cones.iter().map(|c| c.dim()).max().unwrap_or(0)
    }

    /// every maximal cone has the same dimension
    pub fn is_pure(&self) -> bool {
        let mut dims = self.maximal_cones().map(|c| c.dim());
        let Some(first) = dims.next() else { return true };
        dims.all(|d| d == first)
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| c.is_simplicial())
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.cones.contains(c)
    }

    /// every cone of `self` is a cone of `other`
    pub fn is_subfan_of(&self, other: &Fan) -> bool {
        let set: HashSet<&Cone> = other.cones.iter().collect();
        self.cones.iter().all(|c| set.contains(c))
    }

    pub fn support_contains(&self, p: &[Rat]) -> bool {
        self.cones.iter().any(|c| c.contains_rat(p))
    }

    /// the unique cone whose relative interior contains `p`, if any
    pub fn locate_point(&self, p: &[Rat]) -> Option<&Cone> {
        self.cones.iter().find(|c| c.relative_interior_contains(p))
    }

    /// inclusion-minimal cone of the fan containing the whole cone `s`
    pub fn minimal_containing_cone(&self, s: &Cone) -> Result<&Cone, FanError> {
        let p = s.relative_interior_point_rat();
        let c = self.locate_point(&p).ok_or(FanError::NotContained)?;
        if c.contains_cone(s) {
            Ok(c)
        } else {
            Err(FanError::NotContained)
        }
    }

    /// product fan: all pairwise products of cones
    pub fn product(&self, other: &Fan) -> Fan {
        let n = self.ambient_rank + other.ambient_rank;
        let mut cones = Vec::with_capacity(self.cones.len() * other.cones.len());
        for (c, cm) in self.cones.iter().zip(&self.maximal) {
            for (d, dm) in other.cones.iter().zip(&other.maximal) {
                cones.push((c.product(d), *cm && *dm));
            }
        }
        Fan::from_closed_cones_unchecked(n, cones)
    }

    /// intersection fan: all pairwise intersections of cones
    pub fn intersect(&self, other: &Fan) -> Fan {
        assert_eq!(self.ambient_rank, other.ambient_rank, "mixed ambient spaces");
        let mut set: HashSet<Cone> = HashSet::new();
        for c in &self.cones {
            for d in &other.cones {
                set.insert(c.intersect(d));
            }
        }
        let cones: Vec<Cone> = set.into_iter().collect();
        // maximality by containment among the deduplicated results
        let maximal: Vec<bool> = cones
            .iter()
            .map(|c| {
                !cones
                    .iter()
                    .any(|d| d != c && d.dim() > c.dim() && d.contains_cone(c))
            })
            .collect();
        Fan::from_closed_cones_unchecked(
            self.ambient_rank,
            cones.into_iter().zip(maximal).collect(),
        )
    }
}

/// intersection of two cones must be a face of both
fn check_pair(a: &Cone, b: &Cone) -> Result<(), FanError> {
    let eq: Vec<IntVec> = a.equalities().iter().chain(b.equalities()).cloned().collect();
    let ineq: Vec<IntVec> = a
        .facet_forms()
        .iter()
        .chain(b.facet_forms())
        .cloned()
        .collect();
    let w = dd::cone_dd(a.ambient_rank(), &eq, &ineq);
    let w_lin = saturate(&w.lineality, a.ambient_rank());
    let mut w_gens: Vec<IntVec> = w.rays.clone();
    w_gens.extend(w.lineality.iter().cloned());
    let witness = || {
        let mut p = vec![BigInt::zero(); a.ambient_rank()];
        for r in &w.rays {
            for (pi, ri) in p.iter_mut().zip(r) {
                *pi += ri;
            }
        }
        p
    };
    for side in [a, b] {
        if w_lin != *side.lineality() {
            return Err(FanError::NotAFan {
                left: Box::new(a.clone()),
                right: Box::new(b.clone()),
                witness: witness(),
            });
        }
        let lin_basis = side.lineality().basis_rows();
        let mut w_rays: Vec<IntVec> = w
            .rays
            .iter()
            .map(|r| canonical_ray(r, &lin_basis).expect("ray outside lineality"))
            .collect();
        w_rays.sort();
        w_rays.dedup();
        let tight_forms: Vec<&IntVec> = side
            .facet_forms()
            .iter()
            .filter(|g| w_gens.iter().all(|v| dot_int(g, v).is_zero()))
            .collect();
        let mut tight_rays: Vec<IntVec> = side
            .rays()
            .iter()
            .filter(|r| tight_forms.iter().all(|g| dot_int(g, r).is_zero()))
            .cloned()
            .collect();
        tight_rays.sort();
        if w_rays != tight_rays {
            return Err(FanError::NotAFan {
                left: Box::new(a.clone()),
                right: Box::new(b.clone()),
                witness: witness(),
            });
        }
    }
    Ok(())
}

/// The fan `{f = 0}, {f ≥ 0}, {f ≤ 0}` for a nonzero form.
pub fn halfspace_fan(f: &IntVec) -> Result<Fan, FanError> {
    if f.iter().all(|x| x.is_zero()) {
        return Err(FanError::ZeroForm);
    }
    let n = f.len();
    let neg: IntVec = f.iter().map(|x| -x).collect();
    let wall = Cone::from_halfspaces(std::slice::from_ref(f), &[], n);
    let pos = Cone::from_halfspaces(&[], std::slice::from_ref(f), n);
    let negc = Cone::from_halfspaces(&[], &[neg], n);
    Fan::from_cones(vec![wall, pos, negc], &ValidationConfig::default())
}

/// Standard fan with rays `u_1 … u_n` the unit vectors and
/// `u_0 = -u_1 - … - u_n`, one cone per proper subset of `{0,…,n}` with at
/// most `k` elements.
pub fn standard_l(k: usize, n: usize) -> Result<Fan, FanError> {
    if k > n {
        return Err(FanError::BadRange { k, n });
    }
    let mut u: Vec<IntVec> = Vec::with_capacity(n + 1);
    u.push(vec![-int(1); n]);
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = int(1);
        u.push(e);
    }
    let mut cones = Vec::new();
    for mask in 0u64..(1 << (n + 1)) {
        let size = mask.count_ones() as usize;
        if size > k || mask == (1 << (n + 1)) - 1 {
            continue;
        }
        let gens: Vec<IntVec> = (0..=n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| u[i].clone())
            .collect();
        cones.push(Cone::from_generators(&gens, n));
    }
    Fan::from_cones(cones, &ValidationConfig::default())
}

/// A codimension-one face inside a cone, ready for normal vector
/// computation.
#[derive(Debug, Clone, Copy)]
pub struct FacePair<'a> {
    pub tau: &'a Cone,
    pub sigma: &'a Cone,
}

impl<'a> FacePair<'a> {
    pub fn new(tau: &'a Cone, sigma: &'a Cone) -> Result<Self, FanError> {
        if !sigma.contains_cone(tau) {
            return Err(FanError::NotContained);
        }
        if tau.dim() + 1 != sigma.dim() {
            return Err(FanError::NotCodimOne);
        }
        Ok(FacePair { tau, sigma })
    }

    pub fn normal_vector(&self) -> Result<IntVec, FanError> {
        normal_vector(self.sigma, self.tau)
    }
}

/// Primitive normal vector of `sigma` relative to its codimension-one face
/// `tau`: an integral vector in the span lattice of `sigma` whose class
/// generates the quotient by the span lattice of `tau`, signed positively
/// against a facet form of `sigma` vanishing on `tau`, and reduced to the
/// canonical coset representative.
pub fn normal_vector(sigma: &Cone, tau: &Cone) -> Result<IntVec, FanError> {
    if !sigma.contains_cone(tau) {
        return Err(FanError::NotContained);
    }
    if tau.dim() + 1 != sigma.dim() {
        return Err(FanError::NotCodimOne);
    }
    let tau_gens = tau.generators();
    let g = sigma
        .facet_forms()
        .iter()
        .find(|g| tau_gens.iter().all(|v| dot_int(g, v).is_zero()))
        .ok_or(FanError::NotCodimOne)?;

    // coordinates of the face lattice inside the cone lattice
    let sig = sigma.span_lattice();
    let d = sig.rank();
    let mut t_rows: Vec<IntVec> = Vec::new();
    for row in tau.span_lattice().basis_rows() {
        let c = sig
            .coordinates(&row)
            .expect("face lattice lies inside the cone lattice");
        t_rows.push(c);
    }
    let t = IntMat::from_rows(t_rows, d);
    let kernel = kernel_int(&t);
    debug_assert_eq!(kernel.len(), 1);
    let phi = &kernel[0];

    // integral solution of phi·x = 1 via the Smith form of the single row
    let phi_mat = IntMat::from_rows(vec![phi.clone()], d);
    let snf = smith_normal_form(&phi_mat);
    debug_assert!(snf.s.at(0, 0).is_one());
    let sign = dot_int(phi, &snf.v.col_vec(0));
    let x: IntVec = if sign.is_one() {
        snf.v.col_vec(0)
    } else {
        snf.v.col_vec(0).iter().map(|v| -v).collect()
    };

    // back to ambient coordinates
    let basis = sig.basis_rows();
    let mut rep = vec![BigInt::zero(); sigma.ambient_rank()];
    for (coef, row) in x.iter().zip(&basis) {
        for (ri, bi) in rep.iter_mut().zip(row) {
            *ri += coef * bi;
        }
    }
    let val = dot_int(g, &rep);
    debug_assert!(!val.is_zero());
    if val.is_negative() {
        rep = rep.iter().map(|v| -v).collect();
    }
    Ok(reduce_mod_lattice(&rep, &tau.span_lattice().basis_rows()))
}
