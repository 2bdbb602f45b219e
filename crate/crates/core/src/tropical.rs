//! Weighted and marked fans: balancing around codimension-one faces,
//! refinement and equivalence of weight structures, products, the space
//! of balancing weights, and sound irreducibility certificates.

use crate::fan::{normal_vector, Cone, Fan, ValidationConfig};
use crate::linalg::{
    dot_int, lattice_index, primitive_int, rank_int, solve_affine, Int, IntMat, IntVec, Rat,
    RatMat, RatVec,
};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropicalError {
    #[error("scaled weight {0} is not a positive integer")]
    NonIntegralWeight(Rat),
    #[error("the support is not contained in the support of the target fan")]
    SupportNotContained,
}

/// A pure fan with a positive integer weight on every maximal cone,
/// stored in the order of `fan.maximal_cones()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedFan {
    fan: Fan,
    weights: Vec<Int>,
}

/// Witness that a weighted fan fails to balance: the weighted sum of
/// normal vectors around `tau` does not lie in the span of `tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceViolation {
    pub tau: Cone,
    pub residual: IntVec,
}

impl WeightedFan {
    pub fn new(fan: Fan, weights: Vec<Int>) -> WeightedFan {
        assert!(fan.is_pure(), "weighted fans must be pure");
        assert_eq!(
            weights.len(),
            fan.maximal_cones().count(),
            "one weight per maximal cone"
        );
        assert!(weights.iter().all(|w| w.is_positive()), "weights must be positive");
        WeightedFan { fan, weights }
    }

    pub fn with_unit_weights(fan: Fan) -> WeightedFan {
        let n = fan.maximal_cones().count();
        WeightedFan::new(fan, vec![Int::one(); n])
    }

    pub fn from_weight_fn(fan: Fan, mut weight: impl FnMut(&Cone) -> Int) -> WeightedFan {
        let weights = fan.maximal_cones().map(&mut weight).collect();
        WeightedFan::new(fan, weights)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn weights(&self) -> &[Int] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.fan.dim()
    }

    /// weight of a maximal cone
    pub fn weight(&self, sigma: &Cone) -> Option<&Int> {
        self.fan
            .maximal_cones()
            .position(|c| c == sigma)
            .map(|i| &self.weights[i])
    }

    /// First codimension-one face where the weighted sum of primitive
    /// normal vectors leaves the span of the face, if any.
    pub fn balance_violation(&self) -> Option<BalanceViolation> {
        let n = self.fan.ambient_rank();
        let max: Vec<&Cone> = self.fan.maximal_cones().collect();
        for (tau, star) in codim_one_stars(&self.fan) {
            let mut residual = vec![Int::zero(); n];
            for &i in &star {
                let u = normal_vector(max[i], tau)
                    .expect("codimension-one face of a maximal cone");
                for (acc, ui) in residual.iter_mut().zip(&u) {
                    *acc += &self.weights[i] * ui;
                }
            }
            if tau.equalities().iter().any(|e| !dot_int(e, &residual).is_zero()) {
                return Some(BalanceViolation { tau: tau.clone(), residual });
            }
        }
        None
    }

    pub fn is_balanced(&self) -> bool {
        self.balance_violation().is_none()
    }

    /// Multiplies every weight by `lambda`; fails unless all results are
    /// positive integers.
    pub fn scale(&self, lambda: &Rat) -> Result<WeightedFan, TropicalError> {
        let mut weights = Vec::with_capacity(self.weights.len());
        for w in &self.weights {
            let scaled = lambda * Rat::from_integer(w.clone());
            if !scaled.is_integer() || !scaled.is_positive() {
                return Err(TropicalError::NonIntegralWeight(scaled));
            }
            weights.push(scaled.to_integer());
        }
        Ok(WeightedFan { fan: self.fan.clone(), weights })
    }

    /// product fan with the products of the factor weights
    pub fn product(&self, other: &WeightedFan) -> WeightedFan {
        let pf = self.fan.product(&other.fan);
        let mut by_cone: HashMap<Cone, Int> = HashMap::new();
        for (sa, wa) in self.fan.maximal_cones().zip(&self.weights) {
            for (sb, wb) in other.fan.maximal_cones().zip(&other.weights) {
                by_cone.insert(sa.product(sb), wa * wb);
            }
        }
        let weights = pf
            .maximal_cones()
            .map(|c| {
                by_cone
                    .remove(c)
                    .expect("maximal product cones are products of maximal cones")
            })
            .collect();
        WeightedFan::new(pf, weights)
    }

    /// Re-cuts the weighted fan along a second fan whose support covers
    /// it, keeping the weight of each piece from the cone it came from.
    pub fn refine_onto(&self, target: &Fan) -> Result<WeightedFan, TropicalError> {
        assert_eq!(self.fan.ambient_rank(), target.ambient_rank(), "mixed ambient spaces");
        let z = self.fan.intersect(target);
        let d = self.fan.dim();
        for sigma in self.fan.maximal_cones() {
            let pieces: Vec<&Cone> = z
                .cones_of_dim(d)
                .filter(|c| sigma.contains_cone(c))
                .collect();
            if !covers(sigma, &pieces) {
                return Err(TropicalError::SupportNotContained);
            }
        }
        let weights: Vec<Int> = z
            .maximal_cones()
            .map(|zeta| {
                let sigma = self
                    .fan
                    .minimal_containing_cone(zeta)
                    .expect("piece of the intersection lies in some cone");
                self.weight(sigma)
                    .expect("a full-dimensional piece lies in a maximal cone")
                    .clone()
            })
            .collect();
        Ok(WeightedFan::new(z, weights))
    }

    /// Whether `self` refines `coarser`: same support, every maximal cone
    /// contained in a cone of `coarser`, and weights inherited.
    pub fn is_refinement_of(&self, coarser: &WeightedFan) -> bool {
        if self.fan.ambient_rank() != coarser.fan.ambient_rank() || self.dim() != coarser.dim() {
            return false;
        }
        for (zeta, w) in self.fan.maximal_cones().zip(&self.weights) {
            let Ok(sigma) = coarser.fan.minimal_containing_cone(zeta) else {
                return false;
            };
            if coarser.weight(sigma) != Some(w) {
                return false;
            }
        }
        let d = self.dim();
        for sigma in coarser.fan.maximal_cones() {
            let pieces: Vec<&Cone> = self
                .fan
                .cones_of_dim(d)
                .filter(|c| sigma.contains_cone(c))
                .collect();
            if !covers(sigma, &pieces) {
                return false;
            }
        }
        true
    }

    /// same support and matching weights on the common refinement
    pub fn equivalent(&self, other: &WeightedFan) -> bool {
        if self.fan.ambient_rank() != other.fan.ambient_rank() {
            return false;
        }
        match (self.refine_onto(&other.fan), other.refine_onto(&self.fan)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

/// A simplicial pure fan with an integral vector along every ray; the
/// marking must be a positive multiple of its primitive ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedFan {
    fan: Fan,
    markings: BTreeMap<IntVec, IntVec>,
}

impl MarkedFan {
    pub fn new(fan: Fan, markings: BTreeMap<IntVec, IntVec>) -> MarkedFan {
        assert!(fan.is_pure(), "marked fans must be pure");
        assert!(fan.is_simplicial(), "marked fans must be simplicial");
        let rays: BTreeSet<IntVec> = fan
            .maximal_cones()
            .flat_map(|c| c.rays().iter().cloned())
            .collect();
        let keys: BTreeSet<IntVec> = markings.keys().cloned().collect();
        assert_eq!(keys, rays, "exactly one marking per ray of the fan");
        for (ray, m) in &markings {
            assert_eq!(
                primitive_int(m).as_ref(),
                Ok(ray),
                "a marking must be a positive multiple of its ray"
            );
        }
        MarkedFan { fan, markings }
    }

    /// marks every ray with its primitive generator
    pub fn with_primitive_markings(fan: Fan) -> MarkedFan {
        let markings: BTreeMap<IntVec, IntVec> = fan
            .maximal_cones()
            .flat_map(|c| c.rays().iter().cloned())
            .map(|r| (r.clone(), r))
            .collect();
        MarkedFan::new(fan, markings)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn marking(&self, ray: &[Int]) -> Option<&IntVec> {
        self.markings.get(ray)
    }

    /// Balancing with markings in place of weighted normal vectors: around
    /// every codimension-one face, the markings of the opposite rays must
    /// sum to an element of the span of the face.
    pub fn is_balanced(&self) -> bool {
        let n = self.fan.ambient_rank();
        let max: Vec<&Cone> = self.fan.maximal_cones().collect();
        for (tau, star) in codim_one_stars(&self.fan) {
            let mut residual = vec![Int::zero(); n];
            for &i in &star {
                let extra = max[i]
                    .rays()
                    .iter()
                    .find(|r| tau.rays().binary_search(r).is_err())
                    .expect("a codimension-one face omits exactly one ray");
                for (acc, mi) in residual.iter_mut().zip(&self.markings[extra]) {
                    *acc += mi;
                }
            }
            if tau.equalities().iter().any(|e| !dot_int(e, &residual).is_zero()) {
                return false;
            }
        }
        true
    }

    /// Weighted fan with the index of the marking span inside the cone
    /// span lattice as the weight of each maximal cone.
    pub fn to_weighted(&self) -> WeightedFan {
        let weights: Vec<Int> = self
            .fan
            .maximal_cones()
            .map(|sigma| {
                let gens: Vec<IntVec> = sigma
                    .rays()
                    .iter()
                    .map(|r| self.markings[r].clone())
                    .collect();
                lattice_index(&gens, sigma.span_lattice())
                    .expect("markings span the cone lattice over the rationals")
            })
            .collect();
        WeightedFan::new(self.fan.clone(), weights)
    }
}

/// maximal cones having each codimension-one cone as a face, as indices
/// into the maximal cone list
fn codim_one_stars(fan: &Fan) -> Vec<(&Cone, Vec<usize>)> {
    let d = fan.dim();
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    let max: Vec<&Cone> = fan.maximal_cones().collect();
    if fan.is_simplicial() {
        // rays are shared verbatim between a cone and its faces, so the
        // face relation reduces to a subset test on ray indices
        let mut ids: HashMap<&IntVec, usize> = HashMap::new();
        for c in &max {
            for r in c.rays() {
                let next = ids.len();
                ids.entry(r).or_insert(next);
            }
        }
        let idset = |c: &Cone| -> Vec<usize> {
            let mut v: Vec<usize> = c.rays().iter().map(|r| ids[r]).collect();
            v.sort_unstable();
            v
        };
        let max_ids: Vec<Vec<usize>> = max.iter().map(|c| idset(c)).collect();
        for tau in fan.cones_of_dim(d - 1) {
            let t = idset(tau);
            let star: Vec<usize> = max_ids
                .iter()
                .enumerate()
                .filter(|(_, m)| sorted_subset(&t, m))
                .map(|(i, _)| i)
                .collect();
            out.push((tau, star));
        }
    } else {
        for tau in fan.cones_of_dim(d - 1) {
            let star: Vec<usize> = max
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contains_cone(tau))
                .map(|(i, _)| i)
                .collect();
            out.push((tau, star));
        }
    }
    out
}

fn sorted_subset(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

/// Whether cones of a common fan tile `sigma` exactly. The pieces must be
/// contained in `sigma` and have its dimension; then the tiling holds iff
/// every piece facet either lies in the boundary of `sigma` or is shared
/// with a second piece.
fn covers(sigma: &Cone, pieces: &[&Cone]) -> bool {
    if pieces.is_empty() {
        return false;
    }
    for (i, p) in pieces.iter().enumerate() {
        for facet_rays in p.facet_ray_sets() {
            let mut gens = facet_rays;
            gens.extend(p.lineality().basis_rows());
            let on_boundary = sigma
                .facet_forms()
                .iter()
                .any(|g| gens.iter().all(|v| dot_int(g, v).is_zero()));
            if on_boundary {
                continue;
            }
            let shared = pieces
                .iter()
                .enumerate()
                .any(|(j, q)| j != i && gens.iter().all(|v| q.contains(v)));
            if !shared {
                return false;
            }
        }
    }
    true
}

/// Basis of the rational weight vectors, indexed by maximal cones, that
/// satisfy every balancing constraint of the pure fan.
pub fn balancing_weight_space(fan: &Fan) -> Vec<RatVec> {
    assert!(fan.is_pure(), "weight spaces are defined for pure fans");
    let m = fan.maximal_cones().count();
    if m == 0 {
        return Vec::new();
    }
    let max: Vec<&Cone> = fan.maximal_cones().collect();
    let mut rows: Vec<RatVec> = Vec::new();
    for (tau, star) in codim_one_stars(fan) {
        let normals: Vec<(usize, IntVec)> = star
            .iter()
            .map(|&i| {
                (i, normal_vector(max[i], tau).expect("codimension-one face"))
            })
            .collect();
        for e in tau.equalities() {
            let mut row = vec![Rat::zero(); m];
            for (i, u) in &normals {
                row[*i] = Rat::from_integer(dot_int(e, u));
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return (0..m)
            .map(|i| {
                let mut v = vec![Rat::zero(); m];
                v[i] = Rat::one();
                v
            })
            .collect();
    }
    let zero = vec![Rat::zero(); rows.len()];
    let a = RatMat::from_rows(rows, m);
    let (_, kernel) = solve_affine(&a, &zero).expect("homogeneous system");
    kernel
}

/// Sound witnesses that a balanced weighted fan has no tropical fan of
/// the same dimension with strictly smaller support. `None` means no rule
/// applied, not a proof of reducibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrreducibilityCertificate {
    /// a single cone that is a linear subspace of full ambient rank
    FullSpace,
    /// a line through the origin, possibly subdivided at the origin
    Line,
    /// a one-dimensional star whose rays carry a unique linear relation
    /// with no zero coefficient
    StandardL1,
    /// a product of certified factors on complementary coordinate blocks
    ProductOfIrreducibles(
        Box<IrreducibilityCertificate>,
        Box<IrreducibilityCertificate>,
    ),
    /// a one-dimensional fan whose weight space is a line avoiding all
    /// coordinate hyperplanes
    WeightSpaceCertificate,
}

pub fn certify_irreducible(x: &WeightedFan) -> Option<IrreducibilityCertificate> {
    if x.fan().cones().is_empty() || !x.is_balanced() {
        return None;
    }
    let fan = x.fan();
    if fan.cones().len() == 1 {
        let c = &fan.cones()[0];
        if c.rays().is_empty() && c.dim() == fan.ambient_rank() {
            return Some(IrreducibilityCertificate::FullSpace);
        }
        if c.rays().is_empty() && c.dim() == 1 {
            return Some(IrreducibilityCertificate::Line);
        }
    }
    if fan.dim() == 1 {
        let max: Vec<&Cone> = fan.maximal_cones().collect();
        if max.iter().all(|c| c.lineality().rank() == 0 && c.rays().len() == 1) {
            let rays: Vec<&IntVec> = max.iter().map(|c| &c.rays()[0]).collect();
            if rays.len() == 2 {
                let sum: IntVec = rays[0].iter().zip(rays[1]).map(|(a, b)| a + b).collect();
                if sum.iter().all(|v| v.is_zero()) {
                    return Some(IrreducibilityCertificate::Line);
                }
            }
            if rays.len() >= 3 {
                // a unique relation with full support pins every
                // sub-collection of the rays: no proper subset balances
                let cols = IntMat::from_rows(rays.iter().map(|r| (*r).clone()).collect(), fan.ambient_rank());
                let mat = cols.transpose();
                if rank_int(&mat) == rays.len() - 1 {
                    let kernel = crate::linalg::kernel_int(&mat);
                    if kernel.len() == 1 && kernel[0].iter().all(|c| !c.is_zero()) {
                        return Some(IrreducibilityCertificate::StandardL1);
                    }
                }
            }
        }
    }
    if let Some(cert) = certify_product(x) {
        return Some(cert);
    }
    if fan.dim() == 1 {
        // one-dimensional supports cannot be subdivided, so a smaller
        // balanced fan extends by zero to a weight vector with a zero
        // entry; a weight space that is a line with full support has none
        let basis = balancing_weight_space(fan);
        if basis.len() == 1 && basis[0].iter().all(|c| !c.is_zero()) {
            return Some(IrreducibilityCertificate::WeightSpaceCertificate);
        }
    }
    None
}

fn uf_root(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// splits the fan across connected coordinate blocks and certifies both
/// factors; products of irreducible tropical fans are irreducible
fn certify_product(x: &WeightedFan) -> Option<IrreducibilityCertificate> {
    let fan = x.fan();
    let n = fan.ambient_rank();
    if n < 2 {
        return None;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for sigma in fan.maximal_cones() {
        for g in sigma.generators() {
            let mut sup = g
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, _)| i);
            let Some(first) = sup.next() else { continue };
            for i in sup {
                let rf = uf_root(&mut parent, first);
                let r = uf_root(&mut parent, i);
                if r != rf {
                    parent[r] = rf;
                }
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = uf_root(&mut parent, i);
        comps.entry(r).or_default().push(i);
    }
    if comps.len() < 2 {
        return None;
    }
    for coords_a in comps.values() {
        let coords_b: Vec<usize> = (0..n).filter(|i| !coords_a.contains(i)).collect();
        if let Some((wa, wb)) = split_along(x, coords_a, &coords_b) {
            if let (Some(ca), Some(cb)) = (certify_irreducible(&wa), certify_irreducible(&wb)) {
                return Some(IrreducibilityCertificate::ProductOfIrreducibles(
                    Box::new(ca),
                    Box::new(cb),
                ));
            }
        }
    }
    None
}

fn project_vec(v: &[Int], coords: &[usize]) -> IntVec {
    coords.iter().map(|&i| v[i].clone()).collect()
}

fn embed_vec(v: &[Int], coords: &[usize], n: usize) -> IntVec {
    let mut out = vec![Int::zero(); n];
    for (vi, &i) in v.iter().zip(coords) {
        out[i] = vi.clone();
    }
    out
}

/// factors the weighted fan across the given coordinate split, verifying
/// cone structure and weights exactly
fn split_along(
    x: &WeightedFan,
    coords_a: &[usize],
    coords_b: &[usize],
) -> Option<(WeightedFan, WeightedFan)> {
    let fan = x.fan();
    let n = fan.ambient_rank();
    let project_fan = |coords: &[usize]| -> Option<Fan> {
        let mut cones: Vec<Cone> = fan
            .maximal_cones()
            .map(|c| {
                let gens: Vec<IntVec> =
                    c.generators().iter().map(|g| project_vec(g, coords)).collect();
                Cone::from_generators(&gens, coords.len())
            })
            .collect();
        cones.sort();
        cones.dedup();
        Fan::from_cones(cones, &ValidationConfig::default()).ok()
    };
    let fa = project_fan(coords_a)?;
    let fb = project_fan(coords_b)?;
    let amax: Vec<&Cone> = fa.maximal_cones().collect();
    let bmax: Vec<&Cone> = fb.maximal_cones().collect();

    // the maximal cones must be exactly the pairwise products
    let mut produced: Vec<Cone> = Vec::new();
    let mut grid: Vec<Vec<Int>> = Vec::new();
    for a in &amax {
        let mut row = Vec::new();
        for b in &bmax {
            let mut gens: Vec<IntVec> = a
                .generators()
                .iter()
                .map(|g| embed_vec(g, coords_a, n))
                .collect();
            gens.extend(b.generators().iter().map(|g| embed_vec(g, coords_b, n)));
            let prod = Cone::from_generators(&gens, n);
            row.push(x.weight(&prod)?.clone());
            produced.push(prod);
        }
        grid.push(row);
    }
    produced.sort();
    if !produced.iter().eq(fan.maximal_cones()) {
        return None;
    }

    // weights must factor as an outer product of positive integer vectors
    let col0: Vec<Int> = grid.iter().map(|row| row[0].clone()).collect();
    let g = col0.iter().fold(Int::zero(), |acc, w| acc.gcd(w));
    let wa: Vec<Int> = col0.iter().map(|w| w / &g).collect();
    let mut coeffs = vec![Int::zero(); wa.len()];
    coeffs[0] = Int::one();
    let mut running = wa[0].clone();
    for i in 1..wa.len() {
        let e = running.extended_gcd(&wa[i]);
        for c in coeffs[..i].iter_mut() {
            *c *= &e.x;
        }
        coeffs[i] = e.y.clone();
        running = e.gcd;
    }
    let wb: Vec<Int> = (0..bmax.len())
        .map(|j| (0..wa.len()).map(|i| &coeffs[i] * &grid[i][j]).sum())
        .collect();
    for (i, row) in grid.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if &wa[i] * &wb[j] != *w {
                return None;
            }
        }
    }
    Some((WeightedFan::new(fa, wa), WeightedFan::new(fb, wb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::halfspace_fan;
    use crate::fan::standard_l;
    use crate::linalg::{int, int_vec, rat, rat_int, rank_rat};

    fn wf(fan: Fan, ws: &[i64]) -> WeightedFan {
        WeightedFan::new(fan, ws.iter().map(|&w| int(w)).collect())
    }

    fn ray_cone(v: &[i64]) -> Cone {
        Cone::from_generators(&[int_vec(v)], v.len())
    }

    fn three_lines_fan() -> Fan {
        let rays = [[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [-1, -1]];
        Fan::from_cones(
            rays.iter().map(|r| ray_cone(r)).collect(),
            &ValidationConfig::default(),
        )
        .unwrap()
    }

    fn quadrant_fan() -> Fan {
        let q = Cone::from_generators(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2);
        Fan::from_cones(vec![q], &ValidationConfig::default()).unwrap()
    }

    #[test]
    fn weighted_constructor_and_lookup() {
        let x = wf(standard_l(1, 2).unwrap(), &[1, 2, 3]);
        assert_eq!(x.weights(), &[int(1), int(2), int(3)]);
        assert_eq!(x.dim(), 1);
        // maximal cones sort as (-1,-1) < (0,1) < (1,0)
        assert_eq!(x.weight(&ray_cone(&[0, 1])), Some(&int(2)));
        assert_eq!(x.weight(&ray_cone(&[-1, -1])), Some(&int(1)));
        assert_eq!(x.weight(&Cone::origin(2)), None);
    }

    #[test]
    fn halfspace_balance_and_violation() {
        let fan = halfspace_fan(&int_vec(&[1, 0])).unwrap();
        assert!(wf(fan.clone(), &[1, 1]).is_balanced());
        let bad = wf(fan, &[1, 2]);
        let v = bad.balance_violation().unwrap();
        assert_eq!(v.tau, Cone::from_halfspaces(&[int_vec(&[1, 0])], &[], 2));
        assert_eq!(v.residual, int_vec(&[1, 0]));
    }

    #[test]
    fn standard_line_balance() {
        let l12 = standard_l(1, 2).unwrap();
        assert!(wf(l12.clone(), &[1, 1, 1]).is_balanced());
        let v = wf(l12, &[1, 2, 1]).balance_violation().unwrap();
        assert_eq!(v.tau, Cone::origin(2));
        assert_eq!(v.residual, int_vec(&[0, 1]));
        // no codimension-one cones at all
        assert!(wf(Fan::full_space(2), &[7]).is_balanced());
    }

    #[test]
    fn marked_standard_l_family_is_balanced() {
        for n in 0..=3usize {
            for k in 0..=n {
                let m = MarkedFan::with_primitive_markings(standard_l(k, n).unwrap());
                assert!(m.is_balanced(), "k = {k}, n = {n}");
            }
        }
    }

    #[test]
    fn marked_balance_tracks_scaling() {
        let l12 = standard_l(1, 2).unwrap();
        let prim = MarkedFan::with_primitive_markings(l12.clone());
        assert!(prim.is_balanced());
        assert_eq!(prim.to_weighted().weights(), &[int(1), int(1), int(1)]);

        let mut doubled_one: BTreeMap<IntVec, IntVec> = [
            (int_vec(&[-1, -1]), int_vec(&[-2, -2])),
            (int_vec(&[0, 1]), int_vec(&[0, 1])),
            (int_vec(&[1, 0]), int_vec(&[1, 0])),
        ]
        .into_iter()
        .collect();
        let m = MarkedFan::new(l12.clone(), doubled_one.clone());
        assert!(!m.is_balanced());
        assert_eq!(m.to_weighted().weights(), &[int(2), int(1), int(1)]);
        assert!(!m.to_weighted().is_balanced());

        for v in doubled_one.values_mut() {
            if v == &int_vec(&[0, 1]) {
                *v = int_vec(&[0, 2]);
            }
            if v == &int_vec(&[1, 0]) {
                *v = int_vec(&[2, 0]);
            }
        }
        let all_doubled = MarkedFan::new(l12, doubled_one);
        assert!(all_doubled.is_balanced());
        assert_eq!(all_doubled.to_weighted().weights(), &[int(2), int(2), int(2)]);
    }

    #[test]
    fn marked_and_weighted_balance_agree() {
        let mut fans = vec![
            MarkedFan::with_primitive_markings(standard_l(1, 2).unwrap()),
            MarkedFan::with_primitive_markings(standard_l(2, 3).unwrap()),
            MarkedFan::with_primitive_markings(quadrant_fan()),
            MarkedFan::with_primitive_markings(three_lines_fan()),
        ];
        let skew: BTreeMap<IntVec, IntVec> = [
            (int_vec(&[-1, -1]), int_vec(&[-3, -3])),
            (int_vec(&[0, 1]), int_vec(&[0, 1])),
            (int_vec(&[1, 0]), int_vec(&[1, 0])),
        ]
        .into_iter()
        .collect();
        fans.push(MarkedFan::new(standard_l(1, 2).unwrap(), skew));
        for m in fans {
            assert_eq!(m.is_balanced(), m.to_weighted().is_balanced());
        }
    }

    #[test]
    fn marking_span_index_becomes_weight() {
        let c = Cone::from_generators(&[int_vec(&[1, 1]), int_vec(&[1, -1])], 2);
        let fan = Fan::from_cones(vec![c], &ValidationConfig::default()).unwrap();
        let m = MarkedFan::with_primitive_markings(fan);
        assert_eq!(m.to_weighted().weights(), &[int(2)]);
    }

    #[test]
    fn refine_full_plane_onto_halfspaces() {
        let plane = wf(Fan::full_space(2), &[1]);
        let split_x = plane.refine_onto(&halfspace_fan(&int_vec(&[1, 0])).unwrap()).unwrap();
        assert_eq!(split_x.fan(), &halfspace_fan(&int_vec(&[1, 0])).unwrap());
        assert_eq!(split_x.weights(), &[int(1), int(1)]);

        let quadrants = split_x.refine_onto(&halfspace_fan(&int_vec(&[0, 1])).unwrap()).unwrap();
        assert_eq!(quadrants.fan().maximal_cones().count(), 4);
        assert_eq!(quadrants.weights(), &[int(1), int(1), int(1), int(1)]);
        assert!(quadrants.is_balanced());
    }

    #[test]
    fn refine_onto_own_fan_is_identity() {
        let x = wf(standard_l(1, 2).unwrap(), &[1, 2, 3]);
        assert_eq!(x.refine_onto(x.fan()).unwrap(), x);
    }

    #[test]
    fn refine_onto_outside_support_fails() {
        let halfplane = Fan::from_cones(
            vec![Cone::from_halfspaces(&[], &[int_vec(&[1, 0])], 2)],
            &ValidationConfig::default(),
        )
        .unwrap();
        let l12 = wf(standard_l(1, 2).unwrap(), &[1, 1, 1]);
        assert_eq!(
            l12.refine_onto(&halfplane),
            Err(TropicalError::SupportNotContained)
        );
        let plane = wf(Fan::full_space(2), &[1]);
        assert_eq!(
            plane.refine_onto(l12.fan()),
            Err(TropicalError::SupportNotContained)
        );
    }

    #[test]
    fn refinement_direction_and_weights() {
        let full = wf(Fan::full_space(2), &[1]);
        let halves = wf(halfspace_fan(&int_vec(&[1, 0])).unwrap(), &[1, 1]);
        assert!(halves.is_refinement_of(&full));
        assert!(!full.is_refinement_of(&halves));
        assert!(!wf(halfspace_fan(&int_vec(&[1, 0])).unwrap(), &[1, 2]).is_refinement_of(&full));
        assert!(wf(halfspace_fan(&int_vec(&[1, 0])).unwrap(), &[2, 2])
            .is_refinement_of(&wf(Fan::full_space(2), &[2])));

        let quadrants = halves
            .refine_onto(&halfspace_fan(&int_vec(&[0, 1])).unwrap())
            .unwrap();
        assert!(quadrants.is_refinement_of(&halves));
        assert!(quadrants.is_refinement_of(&full));
        assert!(!quadrants.is_refinement_of(&wf(standard_l(1, 2).unwrap(), &[1, 1, 1])));
    }

    #[test]
    fn equivalence_of_line_splits() {
        let line = Fan::from_cones(
            vec![Cone::from_rays_and_lines(&[], &[int_vec(&[1, 0])], 2)],
            &ValidationConfig::default(),
        )
        .unwrap();
        let split = Fan::from_cones(
            vec![ray_cone(&[1, 0]), ray_cone(&[-1, 0])],
            &ValidationConfig::default(),
        )
        .unwrap();
        assert!(wf(line.clone(), &[3]).equivalent(&wf(split.clone(), &[3, 3])));
        assert!(!wf(line.clone(), &[3]).equivalent(&wf(split.clone(), &[3, 2])));
        let l12 = standard_l(1, 2).unwrap();
        assert!(wf(l12.clone(), &[1, 1, 1]).equivalent(&wf(l12.clone(), &[1, 1, 1])));
        assert!(!wf(l12.clone(), &[1, 1, 1]).equivalent(&wf(l12.clone(), &[1, 1, 2])));
        assert!(!wf(line, &[1]).equivalent(&wf(l12, &[1, 1, 1])));
    }

    #[test]
    fn scale_weights() {
        let x = wf(standard_l(1, 2).unwrap(), &[2, 4, 6]);
        assert_eq!(x.scale(&rat(1, 2)).unwrap().weights(), &[int(1), int(2), int(3)]);
        assert_eq!(x.scale(&rat_int(3)).unwrap().weights(), &[int(6), int(12), int(18)]);
        assert_eq!(
            x.scale(&rat(1, 4)),
            Err(TropicalError::NonIntegralWeight(rat(1, 2)))
        );
        assert_eq!(
            x.scale(&rat_int(-1)),
            Err(TropicalError::NonIntegralWeight(rat_int(-2)))
        );
    }

    #[test]
    fn product_multiplies_weights() {
        let halves = wf(halfspace_fan(&int_vec(&[1, 0])).unwrap(), &[2, 2]);
        let l12 = wf(standard_l(1, 2).unwrap(), &[3, 3, 3]);
        let p = halves.product(&l12);
        assert_eq!(p.fan().ambient_rank(), 4);
        assert_eq!(p.weights().len(), 6);
        assert!(p.weights().iter().all(|w| *w == int(6)));
        assert!(p.is_balanced());
    }

    #[test]
    fn weight_space_of_standard_line() {
        let basis = balancing_weight_space(&standard_l(1, 2).unwrap());
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert!(!v[0].is_zero());
        assert!(v.iter().all(|x| x == &v[0]));
    }

    #[test]
    fn weight_space_of_three_lines() {
        let fan = three_lines_fan();
        let basis = balancing_weight_space(&fan);
        // oracle: constraints are the two coordinates of the weighted ray
        // sum, and the ray matrix has full rank
        let rays: Vec<IntVec> = fan.cones_of_dim(1).map(|c| c.rays()[0].clone()).collect();
        let mat = IntMat::from_rows(rays.clone(), 2).transpose();
        assert_eq!(rank_int(&mat), 2);
        assert_eq!(basis.len(), rays.len() - 2);
        assert_eq!(basis.len(), 4);
        for v in &basis {
            for coord in 0..2 {
                let sum: Rat = v
                    .iter()
                    .zip(&rays)
                    .map(|(w, r)| w * Rat::from_integer(r[coord].clone()))
                    .sum();
                assert!(sum.is_zero());
            }
        }
    }

    #[test]
    fn weight_space_of_halfspace_fan() {
        let basis = balancing_weight_space(&halfspace_fan(&int_vec(&[1, 1])).unwrap());
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][0], basis[0][1]);
        assert!(!basis[0][0].is_zero());
    }

    fn in_row_span(basis: &[RatVec], v: &[Rat]) -> bool {
        if basis.is_empty() {
            return v.iter().all(|x| x.is_zero());
        }
        let a = RatMat::from_rows(basis.to_vec(), v.len());
        let mut rows = basis.to_vec();
        rows.push(v.to_vec());
        let b = RatMat::from_rows(rows, v.len());
        rank_rat(&a) == rank_rat(&b)
    }

    #[test]
    fn unit_weights_balance_iff_ones_in_weight_space() {
        let fans = vec![
            standard_l(1, 2).unwrap(),
            standard_l(2, 3).unwrap(),
            halfspace_fan(&int_vec(&[1, 1])).unwrap(),
            three_lines_fan(),
            quadrant_fan(),
        ];
        for fan in fans {
            let units = WeightedFan::with_unit_weights(fan.clone());
            let basis = balancing_weight_space(&fan);
            let m = units.weights().len();
            let ones = vec![Rat::one(); m];
            assert_eq!(units.is_balanced(), in_row_span(&basis, &ones));
        }
    }

    #[test]
    fn certify_linear_spaces() {
        let full = wf(Fan::full_space(3), &[5]);
        assert_eq!(certify_irreducible(&full), Some(IrreducibilityCertificate::FullSpace));

        let line = Fan::from_cones(
            vec![Cone::from_rays_and_lines(&[], &[int_vec(&[1, 1])], 2)],
            &ValidationConfig::default(),
        )
        .unwrap();
        assert_eq!(certify_irreducible(&wf(line, &[1])), Some(IrreducibilityCertificate::Line));

        let split = Fan::from_cones(
            vec![ray_cone(&[1, 1]), ray_cone(&[-1, -1])],
            &ValidationConfig::default(),
        )
        .unwrap();
        assert_eq!(
            certify_irreducible(&wf(split, &[2, 2])),
            Some(IrreducibilityCertificate::Line)
        );
    }

    #[test]
    fn certify_standard_lines() {
        let l12 = WeightedFan::with_unit_weights(standard_l(1, 2).unwrap());
        assert_eq!(certify_irreducible(&l12), Some(IrreducibilityCertificate::StandardL1));
        let l13 = WeightedFan::with_unit_weights(standard_l(1, 3).unwrap());
        assert_eq!(certify_irreducible(&l13), Some(IrreducibilityCertificate::StandardL1));

        let embedded = Fan::from_cones(
            vec![
                ray_cone(&[0, 1, 0]),
                ray_cone(&[0, 0, 1]),
                ray_cone(&[0, -1, -1]),
            ],
            &ValidationConfig::default(),
        )
        .unwrap();
        assert_eq!(
            certify_irreducible(&WeightedFan::with_unit_weights(embedded)),
            Some(IrreducibilityCertificate::StandardL1)
        );
    }

    #[test]
    fn certify_products() {
        use IrreducibilityCertificate::*;
        let line = wf(Fan::full_space(1), &[1]);
        let l12 = WeightedFan::with_unit_weights(standard_l(1, 2).unwrap());
        let p = line.product(&l12);
        assert_eq!(
            certify_irreducible(&p),
            Some(ProductOfIrreducibles(Box::new(FullSpace), Box::new(StandardL1)))
        );

        let plane = wf(Fan::full_space(2), &[1]);
        let q = plane.product(&l12);
        assert_eq!(
            certify_irreducible(&q),
            Some(ProductOfIrreducibles(
                Box::new(FullSpace),
                Box::new(ProductOfIrreducibles(Box::new(FullSpace), Box::new(StandardL1)))
            ))
        );

        let scaled = wf(Fan::full_space(1), &[2]).product(&l12);
        assert_eq!(
            certify_irreducible(&scaled),
            Some(ProductOfIrreducibles(Box::new(FullSpace), Box::new(StandardL1)))
        );
    }

    #[test]
    fn certify_rejects_reducible_and_unbalanced() {
        let union = WeightedFan::with_unit_weights(three_lines_fan());
        assert!(union.is_balanced());
        assert_eq!(certify_irreducible(&union), None);

        let skewed = wf(standard_l(1, 2).unwrap(), &[1, 2, 1]);
        assert_eq!(certify_irreducible(&skewed), None);
    }
}
