//! Linear maps between weighted fans: support validation, image fans,
//! preimages of generic points, mapping degrees, and determinant
//! multiplicities for marked fans.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fan::{Cone, Fan, ValidationConfig};
use crate::linalg::{
    det_rat, dot_int, lattice_index, neg_int_vec, primitive_int, rank_int, solve_affine, Int,
    IntMat, IntVec, Rat, RatMat, RatVec,
};
use crate::tropical::{certify_irreducible, IrreducibilityCertificate, MarkedFan, WeightedFan};

/// bound on the random coefficients used when sampling target points
const COORDINATE_BOUND: i64 = 1_000_000;

/// resampling budget before a degree computation gives up
const SAMPLE_ATTEMPTS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    /// part of the source support maps outside the target support
    #[error("a source cone maps outside the target support at ({})", fmt_rat_vec(point))]
    NotIntoTarget { cone: Box<Cone>, point: RatVec },
    /// the point fails one of the genericity conditions for preimages
    #[error("point ({}) fails the genericity conditions", fmt_rat_vec(.0))]
    NotGeneric(RatVec),
    /// two sample points produced different preimage multiplicity sums
    #[error(
        "preimage sums differ: {} at ({}) and {} at ({})",
        .0.sum_a,
        fmt_rat_vec(&.0.point_a),
        .0.sum_b,
        fmt_rat_vec(&.0.point_b)
    )]
    DegreeMismatch(Box<DegreeMismatch>),
    /// the map does not restrict to a bijection between the spans of the
    /// given cones
    #[error("the map does not restrict to a bijection between the cone spans")]
    SingularRestriction,
}

fn fmt_rat_vec(v: &[Rat]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Two sample points whose preimage multiplicity sums disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeMismatch {
    pub point_a: RatVec,
    pub sum_a: Rat,
    pub point_b: RatVec,
    pub sum_b: Rat,
}

/// A linear map between the ambient spaces of two weighted fans, given by an
/// integer matrix that carries the support of the source into the support of
/// the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanMorphism {
    source: WeightedFan,
    target: WeightedFan,
    matrix: IntMat,
}

/// One preimage point of a generic target point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preimage {
    /// the unique preimage point inside `cone`
    pub point: RatVec,
    /// maximal source cone with the point in its relative interior
    pub cone: Cone,
    /// maximal target cone with the image in its relative interior
    pub target_cone: Cone,
    /// local degree contribution of this point
    pub multiplicity: Rat,
}

impl FanMorphism {
    /// Builds a morphism after checking that `matrix` maps the support of
    /// `source` into the support of `target`: every maximal source cone is
    /// cut along the pullbacks of the forms describing the target cones, and
    /// each resulting piece must map into a single target cone.
    pub fn new(
        source: WeightedFan,
        target: WeightedFan,
        matrix: IntMat,
    ) -> Result<FanMorphism, MorphismError> {
        assert_eq!(
            matrix.cols(),
            source.fan().ambient_rank(),
            "matrix columns must match the source ambient rank"
        );
        assert_eq!(
            matrix.rows(),
            target.fan().ambient_rank(),
            "matrix rows must match the target ambient rank"
        );
        let mut forms: BTreeSet<IntVec> = BTreeSet::new();
        for c in target.fan().cones() {
            for g in c.equalities().iter().chain(c.facet_forms()) {
                forms.insert(sign_normal(g));
            }
        }
        let pulled = pull_back(&matrix, forms.iter());
        let maximal_targets: Vec<&Cone> = target.fan().maximal_cones().collect();
        for sigma in source.fan().maximal_cones() {
            for piece in subdivide(sigma, &pulled) {
                let image = map_cone(&matrix, &piece);
                if !maximal_targets.iter().any(|t| t.contains_cone(&image)) {
                    let point = matrix.mul_vec_rat(&piece.relative_interior_point_rat());
                    return Err(MorphismError::NotIntoTarget { cone: Box::new(piece), point });
                }
            }
        }
        Ok(FanMorphism { source, target, matrix })
    }

    pub fn source(&self) -> &WeightedFan {
        &self.source
    }

    pub fn target(&self) -> &WeightedFan {
        &self.target
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    pub fn apply(&self, point: &[Rat]) -> RatVec {
        self.matrix.mul_vec_rat(point)
    }

    /// Image of a cone: the cone generated by the images of its generators.
    pub fn image_cone(&self, cone: &Cone) -> Cone {
        map_cone(&self.matrix, cone)
    }

    /// True when the kernel of the map meets the span of `cone` only in zero.
    pub fn injective_on(&self, cone: &Cone) -> bool {
        let images: Vec<IntVec> = cone
            .span_lattice()
            .basis_rows()
            .iter()
            .map(|b| self.matrix.mul_vec(b))
            .collect();
        rank_int(&IntMat::from_rows(images, self.matrix.rows())) == cone.dim()
    }

    /// The image fan: the maximal source cones on which the map is injective
    /// are refined until their images form a fan, and the weight of an image
    /// cone adds `source weight * sublattice index` over all pieces mapping
    /// onto it. Returns the empty fan when no maximal cone maps injectively.
    pub fn image_fan(&self) -> WeightedFan {
        self.image_fan_refined_by(&[])
    }

    /// Image fan construction with extra target forms joining the harvested
    /// ones; any such choice produces an equivalent result.
    fn image_fan_refined_by(&self, extra_forms: &[IntVec]) -> WeightedFan {
        let injective: Vec<&Cone> = self
            .source
            .fan()
            .maximal_cones()
            .filter(|c| self.injective_on(c))
            .collect();
        if injective.is_empty() {
            return WeightedFan::new(Fan::empty(self.matrix.rows()), Vec::new());
        }
        let mut forms: BTreeSet<IntVec> = BTreeSet::new();
        for sigma in &injective {
            let image = self.image_cone(sigma);
            for g in image.equalities().iter().chain(image.facet_forms()) {
                forms.insert(sign_normal(g));
            }
        }
        forms.extend(extra_forms.iter().map(|g| sign_normal(g)));
        let pulled = pull_back(&self.matrix, forms.iter());
        let mut weights: HashMap<Cone, Int> = HashMap::new();
        for sigma in &injective {
            let w = self.source.weight(sigma).expect("maximal cone of the source");
            let span_images: Vec<IntVec> = sigma
                .span_lattice()
                .basis_rows()
                .iter()
                .map(|b| self.matrix.mul_vec(b))
                .collect();
            // pieces of one cone share its span, hence also the index
            let pieces = subdivide(sigma, &pulled);
            let index = lattice_index(&span_images, self.image_cone(&pieces[0]).span_lattice())
                .expect("the mapped span lattice has full rank in the image span");
            for piece in pieces {
                let image = self.image_cone(&piece);
                *weights.entry(image).or_insert_with(Int::zero) += w * &index;
            }
        }
        let fan = Fan::from_cones(weights.keys().cloned().collect(), &ValidationConfig::default())
            .expect("images of the refined pieces intersect in common faces");
        let ws: Vec<Int> = fan.maximal_cones().map(|c| weights[c].clone()).collect();
        WeightedFan::new(fan, ws)
    }

    /// True when the image fan is balanced; it always is for balanced sources.
    pub fn pushforward_balanced(&self) -> bool {
        self.image_fan().is_balanced()
    }

    /// All preimage points of `q` together with their local multiplicities
    /// `source weight / target weight * sublattice index`. The point must be
    /// generic: in the relative interior of a maximal target cone and outside
    /// the images of all source cones with lower-dimensional span image.
    pub fn preimages(&self, q: &[Rat]) -> Result<Vec<Preimage>, MorphismError> {
        assert_eq!(q.len(), self.target.fan().ambient_rank(), "point in the wrong space");
        assert_eq!(
            self.source.dim(),
            self.target.dim(),
            "preimages need equidimensional source and target"
        );
        let n = self.source.dim();
        let not_generic = || MorphismError::NotGeneric(q.to_vec());
        let sigma_q = self.target.fan().locate_point(q).ok_or_else(not_generic)?;
        if !self.target.fan().is_maximal(sigma_q) {
            return Err(not_generic());
        }
        // fibres are zero-dimensional away from the images of the
        // lower-dimensional cones and the non-injective maximal ones
        for c in self.source.fan().cones() {
            if (c.dim() < n || !self.injective_on(c)) && self.image_cone(c).contains_rat(q) {
                return Err(not_generic());
            }
        }
        let w_q = self.target.weight(sigma_q).expect("maximal cone of the target");
        let mut out = Vec::new();
        for sigma in self.source.fan().maximal_cones() {
            if !self.injective_on(sigma) {
                continue;
            }
            let basis = sigma.span_lattice().basis_rows();
            let images: Vec<IntVec> = basis.iter().map(|b| self.matrix.mul_vec(b)).collect();
            let system = columns_matrix(&images, self.matrix.rows());
            let Some((t, kernel)) = solve_affine(&system, q) else {
                continue;
            };
            debug_assert!(kernel.is_empty());
            let point: RatVec = (0..self.matrix.cols())
                .map(|j| {
                    basis
                        .iter()
                        .zip(&t)
                        .fold(Rat::zero(), |acc, (b, ti)| acc + ti * Rat::from_integer(b[j].clone()))
                })
                .collect();
            if !sigma.contains_rat(&point) {
                continue;
            }
            if !sigma.relative_interior_contains(&point) {
                return Err(not_generic());
            }
            let index = lattice_index(&images, sigma_q.span_lattice())
                .expect("the mapped span lattice sits inside the target cone lattice");
            let w_p = self.source.weight(sigma).expect("maximal cone of the source");
            out.push(Preimage {
                point,
                cone: sigma.clone(),
                target_cone: sigma_q.clone(),
                multiplicity: Rat::new(w_p * index, w_q.clone()),
            });
        }
        Ok(out)
    }

    /// Samples a generic point of the target support, returning it with its
    /// preimages; gives up with the last rejection after `attempts` tries.
    pub fn sample_generic<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        attempts: usize,
    ) -> Result<(RatVec, Vec<Preimage>), MorphismError> {
        let maximal: Vec<&Cone> = self.target.fan().maximal_cones().collect();
        assert!(!maximal.is_empty(), "cannot sample from an empty target");
        let m = self.target.fan().ambient_rank();
        let mut last = MorphismError::NotGeneric(Vec::new());
        for _ in 0..attempts {
            let cone = maximal[rng.random_range(0..maximal.len())];
            let mut q = vec![Rat::zero(); m];
            for r in cone.rays() {
                let c = Rat::from_integer(Int::from(rng.random_range(1..=COORDINATE_BOUND)));
                for (qj, rj) in q.iter_mut().zip(r) {
                    *qj += &c * Rat::from_integer(rj.clone());
                }
            }
            for b in cone.lineality().basis_rows() {
                let c = Rat::from_integer(Int::from(rng.random_range(-COORDINATE_BOUND..=COORDINATE_BOUND)));
                for (qj, bj) in q.iter_mut().zip(&b) {
                    *qj += &c * Rat::from_integer(bj.clone());
                }
            }
            match self.preimages(&q) {
                Ok(pre) => return Ok((q, pre)),
                Err(e @ MorphismError::NotGeneric(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }

    /// The common value of the preimage multiplicity sums over `trials`
    /// sampled generic points. `certificate` must be the irreducibility
    /// certificate of the (balanced) target; source and target must have the
    /// same dimension. A sum that varies between sample points reports
    /// `DegreeMismatch`, which indicates a violated precondition.
    pub fn degree(
        &self,
        certificate: &IrreducibilityCertificate,
        trials: usize,
        seed: u64,
    ) -> Result<Rat, MorphismError> {
        assert_eq!(
            self.source.dim(),
            self.target.dim(),
            "degrees need equidimensional source and target"
        );
        assert!(trials > 0, "degrees need at least one sample point");
        assert_eq!(
            certify_irreducible(&self.target).as_ref(),
            Some(certificate),
            "certificate must be the certificate of the target"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut first: Option<(RatVec, Rat)> = None;
        for _ in 0..trials {
            let (q, pre) = self.sample_generic(&mut rng, SAMPLE_ATTEMPTS)?;
            let sum = pre.iter().fold(Rat::zero(), |acc, p| acc + &p.multiplicity);
            match &first {
                None => first = Some((q, sum)),
                Some((p0, s0)) => {
                    if *s0 != sum {
                        return Err(MorphismError::DegreeMismatch(Box::new(DegreeMismatch {
                            point_a: p0.clone(),
                            sum_a: s0.clone(),
                            point_b: q,
                            sum_b: sum,
                        })));
                    }
                }
            }
        }
        Ok(first.expect("at least one trial").1)
    }
}

/// Determinant of the restriction of `matrix` to the span of `sigma_p`,
/// written in the bases formed by the ray markings of `sigma_p` and
/// `sigma_q`. Returns its absolute value, which agrees with the preimage
/// multiplicity when the fan weights are the ones induced by the markings.
pub fn det_multiplicity(
    matrix: &IntMat,
    source: &MarkedFan,
    target: &MarkedFan,
    sigma_p: &Cone,
    sigma_q: &Cone,
) -> Result<Rat, MorphismError> {
    assert!(source.fan().contains_cone(sigma_p), "cone is not in the source fan");
    assert!(target.fan().contains_cone(sigma_q), "cone is not in the target fan");
    assert_eq!(sigma_p.dim(), sigma_q.dim(), "the cones must have equal dimension");
    let tgt_basis: Vec<IntVec> = sigma_q
        .rays()
        .iter()
        .map(|r| target.marking(r).expect("marking of a target ray").clone())
        .collect();
    let system = columns_matrix(&tgt_basis, matrix.rows());
    let mut rows: Vec<RatVec> = Vec::with_capacity(sigma_p.rays().len());
    for r in sigma_p.rays() {
        let image = matrix.mul_vec(source.marking(r).expect("marking of a source ray"));
        let image_rat: RatVec = image.into_iter().map(Rat::from_integer).collect();
        let Some((coords, _)) = solve_affine(&system, &image_rat) else {
            return Err(MorphismError::SingularRestriction);
        };
        rows.push(coords);
    }
    let cols = rows.len();
    let det = det_rat(&RatMat::from_rows(rows, cols));
    if det.is_zero() {
        return Err(MorphismError::SingularRestriction);
    }
    Ok(det.abs())
}

/// the cone generated by the images of the generators
fn map_cone(matrix: &IntMat, cone: &Cone) -> Cone {
    let gens: Vec<IntVec> = cone.generators().iter().map(|g| matrix.mul_vec(g)).collect();
    Cone::from_generators(&gens, matrix.rows())
}

/// scales to a primitive form whose first nonzero entry is positive
fn sign_normal(form: &[Int]) -> IntVec {
    let p = primitive_int(form).expect("forms are nonzero");
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => neg_int_vec(&p),
        _ => p,
    }
}

/// pulls the forms back along the matrix, dropping the ones vanishing on the
/// whole source space
fn pull_back<'a>(matrix: &IntMat, forms: impl Iterator<Item = &'a IntVec>) -> Vec<IntVec> {
    let t = matrix.transpose();
    let mut seen: BTreeSet<IntVec> = BTreeSet::new();
    for g in forms {
        let h = t.mul_vec(g);
        if !h.iter().all(|x| x.is_zero()) {
            seen.insert(sign_normal(&h));
        }
    }
    seen.into_iter().collect()
}

/// Cuts `cone` along the given hyperplane forms; the result is the set of
/// closed full-dimensional cells of the induced subdivision of `cone`.
fn subdivide(cone: &Cone, forms: &[IntVec]) -> Vec<Cone> {
    let mut pieces = vec![cone.clone()];
    for h in forms {
        let mut next = Vec::with_capacity(pieces.len());
        for p in pieces {
            let mut pos = false;
            let mut neg = false;
            for g in p.generators() {
                let v = dot_int(h, &g);
                if v.is_positive() {
                    pos = true;
                } else if v.is_negative() {
                    neg = true;
                }
            }
            if pos && neg {
                let ambient = p.ambient_rank();
                let upper = Cone::from_halfspaces(&[], std::slice::from_ref(h), ambient);
                let lower = Cone::from_halfspaces(&[], &[neg_int_vec(h)], ambient);
                next.push(p.intersect(&upper));
                next.push(p.intersect(&lower));
            } else {
                next.push(p);
            }
        }
        pieces = next;
    }
    pieces
}

/// matrix with the given integer vectors as columns
fn columns_matrix(columns: &[IntVec], height: usize) -> RatMat {
    let rows: Vec<RatVec> = (0..height)
        .map(|j| columns.iter().map(|v| Rat::from_integer(v[j].clone())).collect())
        .collect();
    RatMat::from_rows(rows, columns.len())
}
