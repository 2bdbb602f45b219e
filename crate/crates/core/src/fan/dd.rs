//! Exact double description: from linear equalities and inequalities to
//! extreme rays plus lineality, and back (duality).
//!
//! The state keeps an explicit lineality basis, so cones containing lines
//! never need perturbation. Adjacency of rays is decided combinatorially
//! from tight sets over the inequality constraints processed so far.

use crate::linalg::{dot_int, is_zero_vec, primitive_int, IntVec};
use num_traits::{Signed, Zero};

/// Tight set: which processed inequalities a ray satisfies with equality.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TightSet {
    bits: Vec<u64>,
}

impl TightSet {
    fn empty(cap: usize) -> Self {
        TightSet { bits: vec![0; cap.div_ceil(64)] }
    }

    /// all indices below `k` set
    fn full_below(cap: usize, k: usize) -> Self {
        let mut t = TightSet::empty(cap);
        for i in 0..k {
            t.insert(i);
        }
        t
    }

    fn insert(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &TightSet) -> TightSet {
        TightSet {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        }
    }

    fn is_superset_of(&self, other: &TightSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == *b)
    }
}

#[derive(Debug, Clone)]
struct Ray {
    v: IntVec,
    tight: TightSet,
}

/// Generator description of a cone: a lineality basis and extreme rays
/// modulo that lineality. Rays are primitive but not otherwise normalized.
#[derive(Debug, Clone)]
pub struct DdOutput {
    pub lineality: Vec<IntVec>,
    pub rays: Vec<IntVec>,
}

fn dedupe_nonzero(forms: &[IntVec], signless: bool) -> Vec<IntVec> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for f in forms {
        if is_zero_vec(f) {
            continue;
        }
        let mut p = primitive_int(f).expect("nonzero form");
        if signless {
            if let Some(first) = p.iter().find(|x| !x.is_zero()) {
                if first.is_negative() {
                    p = p.iter().map(|x| -x).collect();
                }
            }
        }
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

/// `{x : e·x = 0 for all equalities, g·x >= 0 for all inequalities}` as
/// lineality plus extreme rays.
pub fn cone_dd(ambient: usize, equalities: &[IntVec], inequalities: &[IntVec]) -> DdOutput {
    let eqs = dedupe_nonzero(equalities, true);
    let ineqs = dedupe_nonzero(inequalities, false);
    let cap = ineqs.len();

    let mut lin: Vec<IntVec> = (0..ambient)
        .map(|i| {
            let mut e = vec![num_bigint::BigInt::zero(); ambient];
            e[i] = num_bigint::BigInt::from(1);
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for f in &eqs {
        process_equality(f, &mut lin, &mut rays);
    }
    for (idx, g) in ineqs.iter().enumerate() {
        process_inequality(g, idx, cap, &mut lin, &mut rays);
    }

    DdOutput {
        lineality: lin,
        rays: rays.into_iter().map(|r| r.v).collect(),
    }
}

/// Dual description: facet forms and span equalities of `cone(rays) +
/// span(lines)`. Output `lineality` holds forms vanishing on the whole
/// cone; output `rays` holds the facet forms.
pub fn dual_dd(ambient: usize, rays: &[IntVec], lines: &[IntVec]) -> DdOutput {
    cone_dd(ambient, lines, rays)
}

fn process_equality(f: &IntVec, lin: &mut Vec<IntVec>, rays: &mut Vec<Ray>) {
    if let Some(i) = lin.iter().position(|l| !dot_int(f, l).is_zero()) {
        let mut l0 = lin.remove(i);
        let mut fl0 = dot_int(f, &l0);
        if fl0.is_negative() {
            l0 = l0.iter().map(|x| -x).collect();
            fl0 = -fl0;
        }
        for l in lin.iter_mut() {
            let fl = dot_int(f, l);
            let combo: IntVec = l
                .iter()
                .zip(&l0)
                .map(|(li, l0i)| &fl0 * li - &fl * l0i)
                .collect();
            *l = primitive_int(&combo).expect("independent lineality vector");
        }
        for r in rays.iter_mut() {
            let fr = dot_int(f, &r.v);
            if fr.is_zero() {
                continue;
            }
            let combo: IntVec = r
                .v
                .iter()
                .zip(&l0)
                .map(|(ri, l0i)| &fl0 * ri - &fr * l0i)
                .collect();
            r.v = primitive_int(&combo).expect("extreme ray off the lineality");
        }
        return;
    }
    // f vanishes on the lineality: cut the pointed part
    let vals: Vec<_> = rays.iter().map(|r| dot_int(f, &r.v)).collect();
    let mut next: Vec<Ray> = Vec::new();
    for (r, val) in rays.iter().zip(&vals) {
        if val.is_zero() {
            next.push(r.clone());
        }
    }
    for (pi, p) in rays.iter().enumerate() {
        if !vals[pi].is_positive() {
            continue;
        }
        for (qi, q) in rays.iter().enumerate() {
            if !vals[qi].is_negative() {
                continue;
            }
            if !adjacent(rays, pi, qi) {
                continue;
            }
            let w: IntVec = p
                .v
                .iter()
                .zip(&q.v)
                .map(|(a, b)| &vals[pi] * b - &vals[qi] * a)
                .collect();
            next.push(Ray {
                v: primitive_int(&w).expect("combination of non-parallel rays"),
                tight: p.tight.intersection(&q.tight),
            });
        }
    }
    *rays = next;
}

fn process_inequality(
    g: &IntVec,
    idx: usize,
    cap: usize,
    lin: &mut Vec<IntVec>,
    rays: &mut Vec<Ray>,
) {
    if let Some(i) = lin.iter().position(|l| !dot_int(g, l).is_zero()) {
        let mut l0 = lin.remove(i);
        let mut gl0 = dot_int(g, &l0);
        if gl0.is_negative() {
            l0 = l0.iter().map(|x| -x).collect();
            gl0 = -gl0;
        }
        for l in lin.iter_mut() {
            let gl = dot_int(g, l);
            let combo: IntVec = l
                .iter()
                .zip(&l0)
                .map(|(li, l0i)| &gl0 * li - &gl * l0i)
                .collect();
            *l = primitive_int(&combo).expect("independent lineality vector");
        }
        for r in rays.iter_mut() {
            let gr = dot_int(g, &r.v);
            if !gr.is_zero() {
                let combo: IntVec = r
                    .v
                    .iter()
                    .zip(&l0)
                    .map(|(ri, l0i)| &gl0 * ri - &gr * l0i)
                    .collect();
                r.v = primitive_int(&combo).expect("extreme ray off the lineality");
            }
            r.tight.insert(idx);
        }
        rays.push(Ray { v: l0, tight: TightSet::full_below(cap, idx) });
        return;
    }
    let vals: Vec<_> = rays.iter().map(|r| dot_int(g, &r.v)).collect();
    if vals.iter().all(|v| !v.is_negative()) {
        for (r, val) in rays.iter_mut().zip(&vals) {
            if val.is_zero() {
                r.tight.insert(idx);
            }
        }
        return;
    }
    let mut next: Vec<Ray> = Vec::new();
    for (r, val) in rays.iter().zip(&vals) {
        if val.is_zero() {
            let mut kept = r.clone();
            kept.tight.insert(idx);
            next.push(kept);
        } else if val.is_positive() {
            next.push(r.clone());
        }
    }
    for (pi, p) in rays.iter().enumerate() {
        if !vals[pi].is_positive() {
            continue;
        }
        for (qi, q) in rays.iter().enumerate() {
            if !vals[qi].is_negative() {
                continue;
            }
            if !adjacent(rays, pi, qi) {
                continue;
            }
            let w: IntVec = p
                .v
                .iter()
                .zip(&q.v)
                .map(|(a, b)| &vals[pi] * b - &vals[qi] * a)
                .collect();
            let mut tight = p.tight.intersection(&q.tight);
            tight.insert(idx);
            next.push(Ray {
                v: primitive_int(&w).expect("combination of non-parallel rays"),
                tight,
            });
        }
    }
    *rays = next;
}

/// combinatorial adjacency: no third ray is tight everywhere both are
fn adjacent(rays: &[Ray], pi: usize, qi: usize) -> bool {
    let t = rays[pi].tight.intersection(&rays[qi].tight);
    !rays
        .iter()
        .enumerate()
        .any(|(si, s)| si != pi && si != qi && s.tight.is_superset_of(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, int_vec, rank_int, IntMat};

    fn sorted_prim(vs: Vec<IntVec>) -> Vec<IntVec> {
        let mut out: Vec<IntVec> = vs.iter().map(|v| primitive_int(v).unwrap()).collect();
        out.sort();
        out
    }

    #[test]
    fn quadrant_from_halfspaces() {
        let out = cone_dd(2, &[], &[int_vec(&[1, 0]), int_vec(&[0, 1])]);
        assert!(out.lineality.is_empty());
        assert_eq!(sorted_prim(out.rays), vec![int_vec(&[0, 1]), int_vec(&[1, 0])]);
    }

    #[test]
    fn halfplane_keeps_a_line() {
        let out = cone_dd(2, &[], &[int_vec(&[0, 1])]);
        assert_eq!(out.lineality.len(), 1);
        assert_eq!(primitive_int(&out.lineality[0]).unwrap()[1], int(0));
        assert_eq!(sorted_prim(out.rays), vec![int_vec(&[0, 1])]);
    }

    #[test]
    fn hyperplane_is_all_lineality() {
        let out = cone_dd(3, &[int_vec(&[1, 1, 1])], &[]);
        assert_eq!(out.lineality.len(), 2);
        assert!(out.rays.is_empty());
        for l in &out.lineality {
            assert!(dot_int(&int_vec(&[1, 1, 1]), l).is_zero());
        }
        let m = IntMat::from_rows(out.lineality.clone(), 3);
        assert_eq!(rank_int(&m), 2);
    }

    #[test]
    fn simplex_cone_three_facets() {
        // x >= 0, y >= 0, z >= 0, x + y >= z
        let out = cone_dd(
            3,
            &[],
            &[
                int_vec(&[1, 0, 0]),
                int_vec(&[0, 1, 0]),
                int_vec(&[0, 0, 1]),
                int_vec(&[1, 1, -1]),
            ],
        );
        assert!(out.lineality.is_empty());
        assert_eq!(
            sorted_prim(out.rays),
            vec![
                int_vec(&[0, 1, 0]),
                int_vec(&[0, 1, 1]),
                int_vec(&[1, 0, 0]),
                int_vec(&[1, 0, 1]),
            ]
        );
    }

    #[test]
    fn infeasible_strict_side_collapses() {
        // x >= 0 and -x >= 0 and y >= x: the cone {x = 0, y >= 0}
        let out = cone_dd(2, &[], &[int_vec(&[1, 0]), int_vec(&[-1, 0]), int_vec(&[-1, 1])]);
        assert!(out.lineality.is_empty());
        assert_eq!(sorted_prim(out.rays), vec![int_vec(&[0, 1])]);
    }

    #[test]
    fn dual_of_quadrant_is_quadrant() {
        let out = dual_dd(2, &[int_vec(&[1, 0]), int_vec(&[0, 1])], &[]);
        assert!(out.lineality.is_empty());
        assert_eq!(sorted_prim(out.rays), vec![int_vec(&[0, 1]), int_vec(&[1, 0])]);
    }

    #[test]
    fn dual_of_low_dim_cone_has_equality_forms() {
        // the ray (1,1,0): span equalities x-y=0 and z=0, one facet form
        let out = dual_dd(3, &[int_vec(&[1, 1, 0])], &[]);
        assert_eq!(out.lineality.len(), 2);
        for e in &out.lineality {
            assert!(dot_int(e, &int_vec(&[1, 1, 0])).is_zero());
        }
        assert_eq!(out.rays.len(), 1);
        assert!(dot_int(&out.rays[0], &int_vec(&[1, 1, 0])).is_positive());
    }

    #[test]
    fn ambient_zero_is_the_origin() {
        let out = cone_dd(0, &[], &[]);
        assert!(out.lineality.is_empty());
        assert!(out.rays.is_empty());
    }

    #[test]
    fn cube_cone_has_extreme_ray_count() {
        // cone over a square: 4 rays, facets x>=0, y>=0, z-x>=0, z-y>=0
        let out = cone_dd(
            3,
            &[],
            &[
                int_vec(&[1, 0, 0]),
                int_vec(&[0, 1, 0]),
                int_vec(&[-1, 0, 1]),
                int_vec(&[0, -1, 1]),
            ],
        );
        assert_eq!(out.rays.len(), 4);
        assert!(out.lineality.is_empty());
        assert_eq!(
            sorted_prim(out.rays),
            vec![
                int_vec(&[0, 0, 1]),
                int_vec(&[0, 1, 1]),
                int_vec(&[1, 0, 1]),
                int_vec(&[1, 1, 1]),
            ]
        );
    }
}
