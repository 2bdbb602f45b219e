//! Enumerative counts of rational curves through point, subspace, and
//! cross-ratio conditions.
//!
//! A [`CountProblem`] fixes a degree, a number of contracted ends, and
//! one condition per constrained end. [`count`] walks the trivalent
//! combinatorial types of curves with that degree, writes down one exact
//! linear system per type in the edge lengths and the position of the
//! vertex carrying the first end, and keeps the solutions in which every
//! edge length is strictly positive. Each solution contributes the
//! absolute determinant of its system, the determinant multiplicity of
//! the curve; condition data that places some solution on the boundary
//! of a type, or cuts out a positive-dimensional family, is rejected as
//! [`EnumError::NotGeneric`].

mod solver;
mod stream;

use std::collections::BTreeMap;

use num_bigint::Sign;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{
    det_rat, dot_int, dot_int_rat, kernel_int, lattice_index, lcm_denoms, rank_int, saturate,
    solve_affine, Int, IntMat, IntVec, Lattice, Rat, RatMat, RatVec,
};
use crate::moduli::{
    canonical_side, directions, enumerate_tree_types, ev_matrix, ft4_matrix, Degree, QnSpace,
    TreeType,
};

/// bound on the coordinates of sampled constraint data
pub const CONSTRAINT_BOUND: i64 = 1_000_000;

/// how often sampling retries before giving up
const RESAMPLE_ATTEMPTS: usize = 100;

/// Errors raised while assembling or running a counting problem.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    /// the conditions do not cut the moduli fan down to points
    #[error("conditions cut {got} dimensions, the moduli fan has {expected}")]
    WrongDimension { expected: usize, got: usize },
    #[error("constraint ends must lie in 1..={ends}, got {end}")]
    BadEnd { ends: usize, end: usize },
    #[error("at least {need} contracted ends are required, got {got}")]
    TooFewEnds { need: usize, got: usize },
    #[error("subspace directions must be linearly independent")]
    DependentDirections,
    #[error("a cross-ratio needs a proper split of the first four ends and a positive length")]
    BadCrossRatio,
    #[error("a cross-ratio condition is required")]
    MissingCrossRatio,
    /// some type meets the conditions in a family or on its boundary
    #[error("the conditions are not generic for this degree")]
    NotGeneric,
    #[error("no generic configuration found after {0} attempts")]
    RetriesExhausted(usize),
}

/// How one contracted end is pinned down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintKind {
    /// the end must evaluate to this point
    Point(RatVec),
    /// the end must evaluate into `base + span(directions)`
    AffineSubspace {
        base: RatVec,
        directions: Vec<IntVec>,
    },
}

/// A condition on where one contracted end of a curve may land.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    /// contracted end the condition applies to, numbered from one
    pub end: usize,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn point(end: usize, point: RatVec) -> Constraint {
        Constraint {
            end,
            kind: ConstraintKind::Point(point),
        }
    }

    pub fn subspace(end: usize, base: RatVec, directions: Vec<IntVec>) -> Constraint {
        Constraint {
            end,
            kind: ConstraintKind::AffineSubspace { base, directions },
        }
    }

    /// codimension of the condition inside `R^r`
    fn codim(&self, r: usize) -> usize {
        match &self.kind {
            ConstraintKind::Point(_) => r,
            ConstraintKind::AffineSubspace { directions, .. } => r - directions.len(),
        }
    }
}

/// A condition on the shape of the curve: the four-end curve obtained
/// by forgetting all but the first four contracted ends must be the
/// point at the given length along the ray of the given split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossRatio {
    /// side of the quartet split containing the first end, over the
    /// four labels `0..4`
    pub side: u64,
    pub length: Rat,
}

/// A zero-dimensional counting problem: curves of a fixed degree whose
/// contracted ends satisfy point and subspace conditions, optionally
/// sharpened by a cross-ratio condition.
#[derive(Debug, Clone, PartialEq)]
pub struct CountProblem {
    r: usize,
    contracted: usize,
    delta: Degree,
    constraints: Vec<Constraint>,
    cross_ratio: Option<CrossRatio>,
}

impl CountProblem {
    /// Validates the condition data and its dimension count.
    pub fn new(
        r: usize,
        contracted: usize,
        delta: Degree,
        constraints: Vec<Constraint>,
        cross_ratio: Option<CrossRatio>,
    ) -> Result<CountProblem, EnumError> {
        if delta.r() != r {
            return Err(EnumError::WrongDimension {
                expected: r,
                got: delta.r(),
            });
        }
        if contracted == 0 {
            return Err(EnumError::TooFewEnds { need: 1, got: 0 });
        }
        let total = contracted + delta.len();
        if total < 3 {
            return Err(EnumError::TooFewEnds {
                need: 3,
                got: total,
            });
        }
        assert!(total <= 64, "at most 64 ends are supported");
        for c in &constraints {
            if c.end == 0 || c.end > contracted {
                return Err(EnumError::BadEnd {
                    ends: contracted,
                    end: c.end,
                });
            }
            match &c.kind {
                ConstraintKind::Point(p) => {
                    if p.len() != r {
                        return Err(EnumError::WrongDimension {
                            expected: r,
                            got: p.len(),
                        });
                    }
                }
                ConstraintKind::AffineSubspace { base, directions } => {
                    if base.len() != r || directions.iter().any(|d| d.len() != r) {
                        return Err(EnumError::WrongDimension {
                            expected: r,
                            got: base.len(),
                        });
                    }
                    let mat = IntMat::from_rows(directions.clone(), r);
                    if rank_int(&mat) != directions.len() {
                        return Err(EnumError::DependentDirections);
                    }
                }
            }
        }
        if let Some(cr) = &cross_ratio {
            if contracted < 4 {
                return Err(EnumError::TooFewEnds {
                    need: 4,
                    got: contracted,
                });
            }
            let proper = cr.side < 16 && cr.side & 1 == 1 && cr.side.count_ones() == 2;
            if !proper || !cr.length.is_positive() {
                return Err(EnumError::BadCrossRatio);
            }
        }
        let cut: usize = constraints.iter().map(|c| c.codim(r)).sum::<usize>()
            + usize::from(cross_ratio.is_some());
        let expected = r + total - 3;
        if cut != expected {
            return Err(EnumError::WrongDimension { expected, got: cut });
        }
        Ok(CountProblem {
            r,
            contracted,
            delta,
            constraints,
            cross_ratio,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// number of contracted ends
    pub fn contracted(&self) -> usize {
        self.contracted
    }

    pub fn delta(&self) -> &Degree {
        &self.delta
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn cross_ratio(&self) -> Option<&CrossRatio> {
        self.cross_ratio.as_ref()
    }
}

/// One curve satisfying every condition of a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// combinatorial type, labeled with the contracted ends first and
    /// the degree ends after them
    pub tree: TreeType,
    /// edge lengths aligned with `tree.splits()`
    pub lengths: Vec<Rat>,
    /// position of the vertex carrying the first contracted end
    pub root: RatVec,
    /// determinant multiplicity of the curve
    pub multiplicity: Rat,
}

/// Outcome of a count: the weighted number of curves with labeled
/// degree ends, the order of the symmetry group of the degree, and
/// their quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub labeled: Rat,
    pub group_order: Int,
    pub unlabeled: Rat,
    pub solutions: Vec<Solution>,
}

// ---------------------------------------------------------------------------
// condition rows

/// One row of the per-type linear systems.
enum RowKind {
    /// a linear form applied to the evaluation of one contracted end
    Eval { end: usize, form: IntVec },
    /// total length of the edges inducing the given quartet split
    Pattern { side: u64 },
}

/// Expands the conditions into rows with exact right-hand sides.
fn constraint_rows(problem: &CountProblem) -> Vec<(RowKind, Rat)> {
    let r = problem.r;
    let mut rows = Vec::new();
    for c in &problem.constraints {
        match &c.kind {
            ConstraintKind::Point(p) => {
                for (t, value) in p.iter().enumerate() {
                    let mut form = vec![Int::zero(); r];
                    form[t] = Int::one();
                    rows.push((
                        RowKind::Eval { end: c.end, form },
                        value.clone(),
                    ));
                }
            }
            ConstraintKind::AffineSubspace { base, directions } => {
                // integral forms vanishing on the subspace directions
                for form in kernel_int(&IntMat::from_rows(directions.clone(), r)) {
                    let rhs = dot_int_rat(&form, base);
                    rows.push((RowKind::Eval { end: c.end, form }, rhs));
                }
            }
        }
    }
    if let Some(cr) = &problem.cross_ratio {
        rows.push((RowKind::Pattern { side: cr.side }, cr.length.clone()));
    }
    rows
}

// ---------------------------------------------------------------------------
// the streamed counter

/// Condition rows staged into fixed-width integers, with the degree
/// ends relabeled to come first.
struct Staged {
    deltas: Vec<Vec<i64>>,
    rows: Vec<(StagedKind, i128)>,
    /// common denominator the right-hand sides were scaled by
    scale: Int,
}

enum StagedKind {
    Eval { label: usize, form: Vec<i64> },
    Pattern { side: u64 },
}

fn stage(problem: &CountProblem) -> Option<Staged> {
    let m = problem.delta.len();
    let deltas: Option<Vec<Vec<i64>>> = problem
        .delta
        .entries()
        .iter()
        .map(|d| d.iter().map(|x| i64::try_from(x).ok()).collect())
        .collect();
    let raw = constraint_rows(problem);
    let values: Vec<Rat> = raw.iter().map(|(_, rhs)| rhs.clone()).collect();
    let scale = lcm_denoms(&values);
    let scale_rat = Rat::from_integer(scale.clone());
    let rows: Option<Vec<(StagedKind, i128)>> = raw
        .into_iter()
        .map(|(kind, rhs)| {
            let b = i128::try_from(&(rhs * &scale_rat).to_integer()).ok()?;
            let staged = match kind {
                RowKind::Eval { end, form } => StagedKind::Eval {
                    label: m + end - 1,
                    form: form
                        .iter()
                        .map(|x| i64::try_from(x).ok())
                        .collect::<Option<Vec<i64>>>()?,
                },
                RowKind::Pattern { side } => StagedKind::Pattern { side: side << m },
            };
            Some((staged, b))
        })
        .collect();
    Some(Staged {
        deltas: deltas?,
        rows: rows?,
        scale,
    })
}

/// Counts the curves of a problem.
///
/// Walks every trivalent type once, pruning branches that cannot carry
/// a solution, and solves each type's condition system exactly.
pub fn count(problem: &CountProblem) -> Result<CountResult, EnumError> {
    match stage(problem) {
        Some(staged) => count_streamed(problem, &staged),
        // condition data too large for fixed-width staging
        None => count_naive(problem),
    }
}

fn count_streamed(problem: &CountProblem, staged: &Staged) -> Result<CountResult, EnumError> {
    let r = problem.r;
    let m = problem.delta.len();
    let total = problem.contracted + m;
    let unknowns = r + total - 3;
    debug_assert_eq!(staged.rows.len(), unknowns);
    let first = m; // internal label of the first contracted end
    let qmask = 0b1111u64 << m;
    let mut labeled = Rat::zero();
    let mut solutions: Vec<Solution> = Vec::new();
    let mut a = vec![vec![0i128; unknowns]; unknowns];
    let b: Vec<i128> = staged.rows.iter().map(|(_, rhs)| *rhs).collect();
    stream::for_each_type(
        &staged.deltas,
        r,
        total,
        problem.cross_ratio.is_none(),
        &mut |edges| {
            for (row, (kind, _)) in a.iter_mut().zip(&staged.rows) {
                row.fill(0);
                match kind {
                    StagedKind::Eval { label, form } => {
                        for (t, &f) in form.iter().enumerate() {
                            row[t] = i128::from(f);
                        }
                        for (idx, e) in edges.iter().enumerate() {
                            let at_first = e.far >> first & 1;
                            if at_first != e.far >> label & 1 {
                                let dot: i128 = form
                                    .iter()
                                    .zip(&e.dir)
                                    .map(|(&f, &d)| i128::from(f) * i128::from(d))
                                    .sum();
                                row[r + idx] = if at_first == 1 { -dot } else { dot };
                            }
                        }
                    }
                    StagedKind::Pattern { side } => {
                        for (idx, e) in edges.iter().enumerate() {
                            let mut q = e.far & qmask;
                            if q.count_ones() == 2 {
                                if q & (1 << first) == 0 {
                                    q ^= qmask;
                                }
                                if q == *side {
                                    row[r + idx] = 1;
                                }
                            }
                        }
                    }
                }
            }
            match solver::solve_square(&a, &b) {
                solver::Outcome::SingularInconsistent => Ok(()),
                solver::Outcome::SingularConsistent => Err(EnumError::NotGeneric),
                solver::Outcome::Unique { det, numerators } => {
                    let det_sign = det.sign();
                    let mut boundary = false;
                    for num in &numerators[r..] {
                        match num.sign() {
                            Sign::NoSign => boundary = true,
                            s if s == det_sign => {}
                            // a negative length: not a curve of this type
                            _ => return Ok(()),
                        }
                    }
                    if boundary {
                        return Err(EnumError::NotGeneric);
                    }
                    let denom = &det * &staged.scale;
                    let ext = |far: u64| -> u64 {
                        let mut mask = 0u64;
                        for t in 0..total {
                            if far >> t & 1 == 1 {
                                let label = if t < m {
                                    problem.contracted + t
                                } else {
                                    t - m
                                };
                                mask |= 1 << label;
                            }
                        }
                        mask
                    };
                    let tree = TreeType::new(total, edges.iter().map(|e| ext(e.far)))
                        .expect("streamed types are trees");
                    let by_split: BTreeMap<u64, Rat> = edges
                        .iter()
                        .zip(&numerators[r..])
                        .map(|(e, num)| {
                            let side = canonical_side(ext(e.far), total);
                            (side, Rat::new(num.clone(), denom.clone()))
                        })
                        .collect();
                    let lengths: Vec<Rat> =
                        tree.splits().iter().map(|s| by_split[s].clone()).collect();
                    let root: RatVec = numerators[..r]
                        .iter()
                        .map(|num| Rat::new(num.clone(), denom.clone()))
                        .collect();
                    let multiplicity = Rat::from_integer(det.abs());
                    labeled += multiplicity.clone();
                    solutions.push(Solution {
                        tree,
                        lengths,
                        root,
                        multiplicity,
                    });
                    Ok(())
                }
            }
        },
    )?;
    Ok(assemble(problem, labeled, solutions))
}

fn assemble(problem: &CountProblem, labeled: Rat, mut solutions: Vec<Solution>) -> CountResult {
    solutions.sort_by(|x, y| x.tree.cmp(&y.tree).then_with(|| x.lengths.cmp(&y.lengths)));
    let group_order = problem.delta.symmetry_order();
    let unlabeled = labeled.clone() / Rat::from_integer(group_order.clone());
    CountResult {
        labeled,
        group_order,
        unlabeled,
        solutions,
    }
}

// ---------------------------------------------------------------------------
// the reference counter

/// Counts by materializing every trivalent type and solving in plain
/// rational arithmetic; slow, but with no staging, pruning, or
/// fixed-width arithmetic involved.
fn count_naive(problem: &CountProblem) -> Result<CountResult, EnumError> {
    let r = problem.r;
    let total = problem.contracted + problem.delta.len();
    let unknowns = r + total - 3;
    let raw_rows = constraint_rows(problem);
    let types =
        enumerate_tree_types(total, true).expect("a problem always has at least three ends");
    let mut labeled = Rat::zero();
    let mut solutions = Vec::new();
    for tree in &types {
        let dirs = directions(tree, problem.contracted, &problem.delta);
        let splits = tree.splits();
        let mut mat_rows: Vec<RatVec> = Vec::with_capacity(unknowns);
        let mut rhs: Vec<Rat> = Vec::with_capacity(unknowns);
        for (kind, value) in &raw_rows {
            let mut row = vec![Rat::zero(); unknowns];
            match kind {
                RowKind::Eval { end, form } => {
                    for (t, f) in form.iter().enumerate() {
                        row[t] = Rat::from_integer(f.clone());
                    }
                    for (idx, s) in splits.iter().enumerate() {
                        // canonical sides contain the first end, so the
                        // split separates it from `end` exactly when that
                        // end's bit is missing
                        if s >> (end - 1) & 1 == 0 {
                            row[r + idx] = Rat::from_integer(dot_int(form, &dirs[s]));
                        }
                    }
                }
                RowKind::Pattern { side } => {
                    for (idx, s) in splits.iter().enumerate() {
                        if s & 0b1111 == *side {
                            row[r + idx] = Rat::one();
                        }
                    }
                }
            }
            mat_rows.push(row);
            rhs.push(value.clone());
        }
        let mat = RatMat::from_rows(mat_rows, unknowns);
        match solve_affine(&mat, &rhs) {
            None => continue,
            Some((_, kernel)) if !kernel.is_empty() => return Err(EnumError::NotGeneric),
            Some((x, _)) => {
                let lengths = &x[r..];
                if lengths.iter().any(|l| l.is_negative()) {
                    continue;
                }
                if lengths.iter().any(|l| l.is_zero()) {
                    return Err(EnumError::NotGeneric);
                }
                let multiplicity = det_rat(&mat).abs();
                labeled += multiplicity.clone();
                solutions.push(Solution {
                    tree: tree.clone(),
                    lengths: lengths.to_vec(),
                    root: x[..r].to_vec(),
                    multiplicity,
                });
            }
        }
    }
    Ok(assemble(problem, labeled, solutions))
}

// ---------------------------------------------------------------------------
// derived counts and samplers

/// Degree of the combined evaluation and cross-ratio map at the given
/// conditions: the sum of the multiplicities of all solutions.
///
/// The problem must carry a cross-ratio condition; the value is
/// independent of generic condition data.
pub fn kontsevich_degree(problem: &CountProblem) -> Result<Rat, EnumError> {
    if problem.cross_ratio.is_none() {
        return Err(EnumError::MissingCrossRatio);
    }
    Ok(count(problem)?.labeled)
}

/// Samples one point condition per contracted end with integer
/// coordinates in `[-CONSTRAINT_BOUND, CONSTRAINT_BOUND]`; the same
/// seed always yields the same points.
pub fn sample_point_constraints(r: usize, ends: usize, seed: u64) -> Vec<Constraint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=ends)
        .map(|end| {
            let point = (0..r)
                .map(|_| {
                    Rat::from_integer(Int::from(
                        rng.random_range(-CONSTRAINT_BOUND..=CONSTRAINT_BOUND),
                    ))
                })
                .collect();
            Constraint::point(end, point)
        })
        .collect()
}

/// Samples one affine subspace condition of dimension `dim` per
/// contracted end: integral base points in the usual range, directions
/// drawn among the zero-one vectors of a single sign, with the spans of
/// distinct conditions kept pairwise distinct.
///
/// Incidence counts through subspaces of these direction classes do not
/// depend on the sampled data; arbitrary direction classes change the
/// count itself, not just the solutions.
pub fn sample_subspace_constraints(
    r: usize,
    dim: usize,
    ends: usize,
    seed: u64,
) -> Result<Vec<Constraint>, EnumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: Vec<Vec<IntVec>> = Vec::new();
    let mut out = Vec::with_capacity(ends);
    for end in 1..=ends {
        let base: RatVec = (0..r)
            .map(|_| {
                Rat::from_integer(Int::from(
                    rng.random_range(-CONSTRAINT_BOUND..=CONSTRAINT_BOUND),
                ))
            })
            .collect();
        let mut found = None;
        for _ in 0..RESAMPLE_ATTEMPTS {
            let dirs: Vec<IntVec> = (0..dim)
                .map(|_| {
                    let sign = if rng.random_range(0..2i64) == 0 { 1 } else { -1 };
                    (0..r)
                        .map(|_| Int::from(sign * rng.random_range(0..=1i64)))
                        .collect()
                })
                .collect();
            if rank_int(&IntMat::from_rows(dirs.clone(), r)) != dim {
                continue;
            }
            // spans compare by their canonical saturated basis
            let key = saturate(&dirs, r).basis_rows();
            if used.contains(&key) {
                continue;
            }
            used.push(key);
            found = Some(dirs);
            break;
        }
        let Some(dirs) = found else {
            return Err(EnumError::RetriesExhausted(RESAMPLE_ATTEMPTS));
        };
        out.push(Constraint::subspace(end, base, dirs));
    }
    Ok(out)
}

/// Builds a problem from successive seeds until one counts generically;
/// reports the result together with the seed that produced it.
pub fn count_with_retries(
    mut make: impl FnMut(u64) -> Result<CountProblem, EnumError>,
    seed: u64,
    attempts: usize,
) -> Result<(CountResult, u64), EnumError> {
    for t in 0..attempts {
        let s = seed.wrapping_add(t as u64);
        match count(&make(s)?) {
            Ok(result) => return Ok((result, s)),
            Err(EnumError::NotGeneric) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(EnumError::RetriesExhausted(attempts))
}

// ---------------------------------------------------------------------------
// the lattice cross-check

/// Multiplicity of a solution recomputed through lattice indices: the
/// weight of the solution's cone times the index of the image of its
/// span lattice under the combined condition map. Agrees with the
/// determinant multiplicity the counter produced.
pub fn lattice_multiplicity(problem: &CountProblem, solution: &Solution) -> Rat {
    let r = problem.r;
    let total = problem.contracted + problem.delta.len();
    let space = QnSpace::new(total).expect("a problem always has at least three ends");
    let rank = space.rank();
    let cols = rank + r;
    let mut pi_rows: Vec<IntVec> = Vec::new();
    let mut ev_cache: BTreeMap<usize, IntMat> = BTreeMap::new();
    for (kind, _) in constraint_rows(problem) {
        match kind {
            RowKind::Eval { end, form } => {
                let ev = ev_cache
                    .entry(end)
                    .or_insert_with(|| ev_matrix(end, problem.contracted, &space, &problem.delta));
                pi_rows.push(apply_form(&form, ev));
            }
            RowKind::Pattern { side } => {
                let q4 = QnSpace::new(4).expect("four labels");
                let ft = ft4_matrix(&space, r, &q4);
                let class = q4.split_class(side).expect("a proper quartet split");
                // integral form taking value one on the primitive ray class
                let e = class[0].extended_gcd(&class[1]);
                debug_assert!(e.gcd.is_one());
                pi_rows.push(apply_form(&[e.x, e.y], &ft));
            }
        }
    }
    let dim = pi_rows.len();
    let pi = IntMat::from_rows(pi_rows, cols);
    let mut gens: Vec<IntVec> = Vec::new();
    for s in solution.tree.splits() {
        let mut v = space
            .split_class(*s)
            .expect("solution splits are proper")
            .clone();
        v.extend((0..r).map(|_| Int::zero()));
        gens.push(v);
    }
    for t in 0..r {
        let mut v = vec![Int::zero(); cols];
        v[rank + t] = Int::one();
        gens.push(v);
    }
    let span = saturate(&gens, cols);
    let weight = lattice_index(&gens, &span).expect("marking vectors span the cone");
    let images: Vec<IntVec> = span.basis_rows().iter().map(|v| pi.mul_vec(v)).collect();
    let index =
        lattice_index(&images, &Lattice::standard(dim)).expect("solution systems are invertible");
    Rat::from_integer(weight * index)
}

/// the row vector `form * mat`
fn apply_form(form: &[Int], mat: &IntMat) -> IntVec {
    (0..mat.cols())
        .map(|j| (0..mat.rows()).map(|t| &form[t] * mat.at(t, j)).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_vec, rat_vec};

    fn spatial_line() -> Degree {
        Degree::new(
            3,
            vec![
                int_vec(&[1, 1, 1]),
                int_vec(&[-1, 0, 0]),
                int_vec(&[0, -1, 0]),
                int_vec(&[0, 0, -1]),
            ],
        )
        .unwrap()
    }

    fn plane_problem(n: usize, constraints: Vec<Constraint>) -> CountProblem {
        CountProblem::new(2, n, Degree::plane(1), constraints, None).unwrap()
    }

    #[test]
    fn the_smallest_problem_parks_one_end_on_a_point() {
        let delta = Degree::new(1, vec![int_vec(&[1]), int_vec(&[-1])]).unwrap();
        let problem =
            CountProblem::new(1, 1, delta, vec![Constraint::point(1, rat_vec(&[5]))], None)
                .unwrap();
        let result = count(&problem).unwrap();
        assert_eq!(result.labeled, Rat::from_integer(Int::from(1)));
        assert_eq!(result.solutions.len(), 1);
        let sol = &result.solutions[0];
        assert_eq!(sol.root, rat_vec(&[5]));
        assert!(sol.tree.splits().is_empty());
        assert_eq!(sol.multiplicity, Rat::from_integer(Int::from(1)));
    }

    #[test]
    fn one_line_passes_through_two_generic_points() {
        for seed in [1, 2, 3] {
            let problem = plane_problem(2, sample_point_constraints(2, 2, seed));
            let result = count(&problem).unwrap();
            assert_eq!(result.labeled, Rat::from_integer(Int::from(1)), "seed {seed}");
            assert_eq!(result.group_order, Int::from(1));
            assert_eq!(result.unlabeled, Rat::from_integer(Int::from(1)));
            assert_eq!(result.solutions.len(), 1);
            assert!(result.solutions[0]
                .lengths
                .iter()
                .all(|l| l.is_positive()));
        }
    }

    #[test]
    fn coincident_points_are_rejected() {
        let p = rat_vec(&[7, 11]);
        let problem = plane_problem(
            2,
            vec![Constraint::point(1, p.clone()), Constraint::point(2, p)],
        );
        assert_eq!(count(&problem), Err(EnumError::NotGeneric));
    }

    #[test]
    fn points_on_a_common_ray_are_rejected() {
        // both points sit on one ray direction of the degree, so curves
        // through them slide in a one-parameter family
        let problem = plane_problem(
            2,
            vec![
                Constraint::point(1, rat_vec(&[0, 0])),
                Constraint::point(2, rat_vec(&[2, 2])),
            ],
        );
        assert_eq!(count(&problem), Err(EnumError::NotGeneric));
    }

    #[test]
    fn streamed_and_naive_counts_agree() {
        // two points on a line in the plane
        let small = plane_problem(2, sample_point_constraints(2, 2, 11));
        // two points and one line condition in the plane
        let mut mixed_constraints = sample_point_constraints(2, 2, 12);
        mixed_constraints
            .extend(sample_subspace_constraints(2, 1, 1, 13).unwrap().into_iter().map(
                |mut c| {
                    c.end = 3;
                    c
                },
            ));
        let mixed = CountProblem::new(2, 3, Degree::plane(1), mixed_constraints, None).unwrap();
        // two points on a line in space
        let spatial = CountProblem::new(
            3,
            2,
            spatial_line(),
            sample_point_constraints(3, 2, 14),
            None,
        )
        .unwrap();
        // two points and two lines in the plane
        let mut wide_constraints = sample_point_constraints(2, 2, 15);
        for mut c in sample_subspace_constraints(2, 1, 2, 16).unwrap() {
            c.end += 2;
            wide_constraints.push(c);
        }
        let wide = CountProblem::new(2, 4, Degree::plane(1), wide_constraints, None).unwrap();
        for problem in [&small, &mixed, &spatial, &wide] {
            let fast = count(problem).unwrap();
            let slow = count_naive(problem).unwrap();
            assert_eq!(fast, slow);
        }
        // a line in space through two points is unique
        assert_eq!(
            count(&spatial).unwrap().labeled,
            Rat::from_integer(Int::from(1))
        );
    }

    #[test]
    fn two_lines_meet_four_generic_lines_in_space() {
        let make = |seed: u64| {
            CountProblem::new(
                3,
                4,
                spatial_line(),
                sample_subspace_constraints(3, 1, 4, seed)?,
                None,
            )
        };
        let (result, _) = count_with_retries(make, 21, 5).unwrap();
        assert_eq!(result.labeled, Rat::from_integer(Int::from(2)));
        assert_eq!(result.group_order, Int::from(1));
    }

    #[test]
    fn cross_ratio_degrees_match_across_rays_and_data() {
        for side in [0b0011u64, 0b0101, 0b1001] {
            for seed in [31, 32] {
                let problem = cross_ratio_problem(side, seed);
                assert_eq!(
                    kontsevich_degree(&problem).unwrap(),
                    Rat::from_integer(Int::from(1)),
                );
            }
        }
    }

    fn cross_ratio_problem(side: u64, seed: u64) -> CountProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coord =
            |bound: i64| Rat::from_integer(Int::from(rng.random_range(-bound..=bound)));
        let constraints = vec![
            Constraint::point(1, vec![coord(1000), coord(1000)]),
            Constraint::point(2, vec![coord(1000), coord(1000)]),
            // pin only the first coordinate of the third end
            Constraint::subspace(3, vec![coord(1000), Rat::zero()], vec![int_vec(&[0, 1])]),
        ];
        let length = coord(1000).abs() + Rat::one();
        CountProblem::new(
            2,
            4,
            Degree::plane(1),
            constraints,
            Some(CrossRatio { side, length }),
        )
        .unwrap()
    }

    #[test]
    fn cross_ratio_agrees_with_the_naive_counter() {
        let problem = cross_ratio_problem(0b0011, 33);
        assert_eq!(count(&problem).unwrap(), count_naive(&problem).unwrap());
    }

    #[test]
    fn determinant_and_lattice_multiplicities_agree() {
        let problem = plane_problem(2, sample_point_constraints(2, 2, 41));
        let result = count(&problem).unwrap();
        for sol in &result.solutions {
            assert_eq!(lattice_multiplicity(&problem, sol), sol.multiplicity);
        }
        let cross = cross_ratio_problem(0b0101, 42);
        let result = count(&cross).unwrap();
        assert!(!result.solutions.is_empty());
        for sol in &result.solutions {
            assert_eq!(lattice_multiplicity(&cross, sol), sol.multiplicity);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(
            sample_point_constraints(2, 3, 42),
            sample_point_constraints(2, 3, 42)
        );
        assert_ne!(
            sample_point_constraints(2, 3, 42),
            sample_point_constraints(2, 3, 43)
        );
        let lines = sample_subspace_constraints(3, 1, 4, 7).unwrap();
        assert_eq!(lines, sample_subspace_constraints(3, 1, 4, 7).unwrap());
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn retries_surface_persistent_degeneracy() {
        let p = rat_vec(&[1, 2]);
        let make = |_seed: u64| {
            Ok(plane_problem(
                2,
                vec![Constraint::point(1, p.clone()), Constraint::point(2, p.clone())],
            ))
        };
        assert_eq!(
            count_with_retries(make, 0, 3),
            Err(EnumError::RetriesExhausted(3))
        );
    }

    #[test]
    fn malformed_problems_are_rejected() {
        let one_point = vec![Constraint::point(1, rat_vec(&[0, 0]))];
        assert_eq!(
            CountProblem::new(2, 2, Degree::plane(1), one_point, None),
            Err(EnumError::WrongDimension {
                expected: 4,
                got: 2
            })
        );
        let stray_end = vec![
            Constraint::point(1, rat_vec(&[0, 0])),
            Constraint::point(3, rat_vec(&[1, 1])),
        ];
        assert_eq!(
            CountProblem::new(2, 2, Degree::plane(1), stray_end, None),
            Err(EnumError::BadEnd { ends: 2, end: 3 })
        );
        assert_eq!(
            CountProblem::new(2, 0, Degree::plane(1), Vec::new(), None),
            Err(EnumError::TooFewEnds { need: 1, got: 0 })
        );
        assert_eq!(
            CountProblem::new(3, 2, Degree::plane(1), Vec::new(), None),
            Err(EnumError::WrongDimension {
                expected: 3,
                got: 2
            })
        );
        let dependent = vec![Constraint::subspace(
            1,
            rat_vec(&[0, 0]),
            vec![int_vec(&[1, 0]), int_vec(&[2, 0])],
        )];
        assert_eq!(
            CountProblem::new(2, 1, Degree::plane(1), dependent, None),
            Err(EnumError::DependentDirections)
        );
    }

    #[test]
    fn malformed_cross_ratios_are_rejected() {
        let constraints = vec![
            Constraint::point(1, rat_vec(&[0, 0])),
            Constraint::point(2, rat_vec(&[1, 5])),
            Constraint::subspace(3, rat_vec(&[2, 0]), vec![int_vec(&[0, 1])]),
        ];
        let build = |side: u64, length: Rat, ends: usize| {
            CountProblem::new(
                2,
                ends,
                Degree::plane(1),
                constraints.clone(),
                Some(CrossRatio { side, length }),
            )
        };
        assert_eq!(
            build(0b0110, Rat::one(), 4),
            Err(EnumError::BadCrossRatio)
        );
        assert_eq!(
            build(0b0011, Rat::zero(), 4),
            Err(EnumError::BadCrossRatio)
        );
        assert_eq!(
            build(0b0011, Rat::one(), 3),
            Err(EnumError::TooFewEnds { need: 4, got: 3 })
        );
        let no_ratio = CountProblem::new(
            2,
            2,
            Degree::plane(1),
            sample_point_constraints(2, 2, 1),
            None,
        )
        .unwrap();
        assert_eq!(
            kontsevich_degree(&no_ratio),
            Err(EnumError::MissingCrossRatio)
        );
    }
}
