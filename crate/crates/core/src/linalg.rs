//! Exact integer and rational linear algebra.
//!
//! All operations are over `BigInt` / `BigRational`; nothing here rounds.
//! Lattices are represented by canonical row-style Hermite bases, so two
//! lattices are equal iff their stored bases are equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;
pub type RatVec = Vec<Rat>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("zero vector has no primitive generator")]
    ZeroVector,
    #[error("generators do not span a full-rank sublattice of the ambient lattice")]
    NotFullRank,
    #[error("vector does not lie in the ambient lattice")]
    NotInLattice,
}

pub fn int(x: i64) -> Int {
    Int::from(x)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn int_vec(xs: &[i64]) -> IntVec {
    xs.iter().map(|&x| Int::from(x)).collect()
}

pub fn rat_vec(xs: &[i64]) -> RatVec {
    xs.iter().map(|&x| rat_int(x)).collect()
}

pub fn to_rat_vec(v: &[Int]) -> RatVec {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Applies an integer form to a rational vector.
pub fn dot_int_rat(f: &[Int], v: &[Rat]) -> Rat {
    debug_assert_eq!(f.len(), v.len());
    f.iter()
        .zip(v)
        .map(|(x, y)| Rat::from_integer(x.clone()) * y)
        .sum()
}

pub fn neg_int_vec(v: &[Int]) -> IntVec {
    v.iter().map(|x| -x).collect()
}

pub fn add_int_vecs(a: &[Int], b: &[Int]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// gcd of the absolute values of the entries; zero for the zero vector.
pub fn content(v: &[Int]) -> Int {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Divides an integer vector by its content, keeping the direction.
pub fn primitive_int(v: &[Int]) -> Result<IntVec, LinalgError> {
    let g = content(v);
    if g.is_zero() {
        return Err(LinalgError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Smallest positive multiple of a rational vector that is integral and
/// primitive. The direction is preserved, never flipped.
pub fn primitive_generator(v: &[Rat]) -> Result<IntVec, LinalgError> {
    let mut l = Int::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let w: IntVec = v
        .iter()
        .map(|x| (x * Rat::from_integer(l.clone())).to_integer())
        .collect();
    primitive_int(&w)
}

// ---------------------------------------------------------------------------
// matrices

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<IntVec>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend(r);
        }
        IntMat { rows: n, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMat::from_rows(rows.iter().map(|r| int_vec(r)).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> IntVec {
        self.row(i).to_vec()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Int]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn col_vec(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> IntVec {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot_int(self.row(i), v)).collect()
    }

    pub fn mul_vec_rat(&self, v: &[Rat]) -> RatVec {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot_int_rat(self.row(i), v)).collect()
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// row_i -= q * row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let v = self.at(i, k) - q * self.at(j, k);
            self.set(i, k, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -self.at(i, k);
            self.set(i, k, v);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// col_i -= q * col_j
    fn col_sub(&mut self, i: usize, j: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.at(r, i) - q * self.at(r, j);
            self.set(r, i, v);
        }
    }

    fn negate_col(&mut self, i: usize) {
        for r in 0..self.rows {
            let v = -self.at(r, i);
            self.set(r, i, v);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<RatVec>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend(r);
        }
        RatMat { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rat]) -> RatVec {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot_rat(self.row(i), v)).collect()
    }
}

// ---------------------------------------------------------------------------
// normal forms

/// Row-style Hermite normal form: `u * m = h` with `u` unimodular.
///
/// `h` is canonical: pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, zero rows are at the bottom. Two integer row spans are
/// equal iff their Hermite forms are equal.
pub struct Hnf {
    pub h: IntMat,
    pub u: IntMat,
}

pub fn hermite_normal_form(m: &IntMat) -> Hnf {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.rows());
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // gcd elimination below the pivot
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows {
                if !h.at(i, col).is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => h.at(i, col).abs() < h.at(b, col).abs(),
                    };
                    if better {
                        best = Some(i);
                    }
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut done = true;
            for i in (pivot_row + 1)..rows {
                if h.at(i, col).is_zero() {
                    continue;
                }
                let q = h.at(i, col).div_floor(h.at(pivot_row, col));
                h.row_sub(i, pivot_row, &q);
                u.row_sub(i, pivot_row, &q);
                if !h.at(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.at(pivot_row, col).is_zero() {
            continue;
        }
        if h.at(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        // reduce entries above the pivot into [0, pivot)
        for i in 0..pivot_row {
            let q = h.at(i, col).div_floor(h.at(pivot_row, col));
            h.row_sub(i, pivot_row, &q);
            u.row_sub(i, pivot_row, &q);
        }
        pivot_row += 1;
    }
    Hnf { h, u }
}

/// Smith normal form: `u * m * v = s` with `u`, `v` unimodular and the
/// diagonal `d_1 | d_2 | ...`, all non-negative.
pub struct Snf {
    pub s: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

pub fn smith_normal_form(m: &IntMat) -> Snf {
    let mut s = m.clone();
    let mut u = IntMat::identity(m.rows());
    let mut v = IntMat::identity(m.cols());
    let n = m.rows().min(m.cols());
    for t in 0..n {
        'pivot: loop {
            // smallest nonzero entry of the trailing block goes to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..s.rows() {
                for j in t..s.cols() {
                    if !s.at(i, j).is_zero() {
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => s.at(i, j).abs() < s.at(bi, bj).abs(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let Some((bi, bj)) = best else { break 'pivot };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let mut clean = true;
            for i in (t + 1)..s.rows() {
                if s.at(i, t).is_zero() {
                    continue;
                }
                let q = s.at(i, t).div_floor(s.at(t, t));
                s.row_sub(i, t, &q);
                u.row_sub(i, t, &q);
                if !s.at(i, t).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            for j in (t + 1)..s.cols() {
                if s.at(t, j).is_zero() {
                    continue;
                }
                let q = s.at(t, j).div_floor(s.at(t, t));
                s.col_sub(j, t, &q);
                v.col_sub(j, t, &q);
                if !s.at(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // divisibility: fold any bad entry into the pivot row
            for i in (t + 1)..s.rows() {
                for j in (t + 1)..s.cols() {
                    if !s.at(i, j).is_multiple_of(s.at(t, t)) {
                        let one = Int::one();
                        let neg = -&one;
                        s.row_sub(t, i, &neg); // row_t += row_i
                        u.row_sub(t, i, &neg);
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
        if s.at(t, t).is_negative() {
            s.negate_col(t);
            v.negate_col(t);
        }
    }
    Snf { s, u, v }
}

/// Exact determinant by fraction-free Bareiss elimination.
pub fn det_int(m: &IntMat) -> Int {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Int::one();
    }
    let mut a = m.clone();
    let mut sign = 1i32;
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a.at(k, k).is_zero() {
            let swap = ((k + 1)..n).find(|&i| !a.at(i, k).is_zero());
            match swap {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                a.set(i, j, &num / &prev);
            }
            a.set(i, k, Int::zero());
        }
        prev = a.at(k, k).clone();
    }
    let d = a.at(n - 1, n - 1).clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact rational determinant; clears each row's denominators and
/// divides the integer determinant back by the product of the scales.
pub fn det_rat(m: &RatMat) -> Rat {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let mut denom = Int::one();
    let mut int_rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row = m.row(i);
        let scale = lcm_denoms(row);
        let scale_rat = Rat::from_integer(scale.clone());
        denom *= &scale;
        int_rows.push(row.iter().map(|x| (x * &scale_rat).to_integer()).collect());
    }
    Rat::new(det_int(&IntMat::from_rows(int_rows, m.cols())), denom)
}

// ---------------------------------------------------------------------------
// rational elimination

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut RatMat) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(p) = (r..m.rows()).find(|&i| !m.at(i, c).is_zero()) else {
            continue;
        };
        for k in 0..m.cols() {
            let tmp = m.at(r, k).clone();
            m.set(r, k, m.at(p, k).clone());
            m.set(p, k, tmp);
        }
        let inv = m.at(r, c).recip();
        for k in 0..m.cols() {
            let v = m.at(r, k) * &inv;
            m.set(r, k, v);
        }
        for i in 0..m.rows() {
            if i != r && !m.at(i, c).is_zero() {
                let f = m.at(i, c).clone();
                for k in 0..m.cols() {
                    let v = m.at(i, k) - &f * m.at(r, k);
                    m.set(i, k, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_rat(m: &RatMat) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

pub fn rank_int(m: &IntMat) -> usize {
    rank_rat(&m.to_rat())
}

/// Solves `a x = b` exactly. Returns a particular solution together with a
/// basis of the kernel of `a`, or `None` if the system is inconsistent.
pub fn solve_affine(a: &RatMat, b: &[Rat]) -> Option<(RatVec, Vec<RatVec>)> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = RatMat::zero(a.rows(), n + 1);
    for (i, bi) in b.iter().enumerate() {
        for j in 0..n {
            aug.set(i, j, a.at(i, j).clone());
        }
        aug.set(i, n, bi.clone());
    }
    let pivots = rref(&mut aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut particular = vec![Rat::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug.at(r, n).clone();
    }
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut kernel = Vec::new();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut k = vec![Rat::zero(); n];
        k[free] = Rat::one();
        for (r, &c) in pivots.iter().enumerate() {
            k[c] = -aug.at(r, free).clone();
        }
        kernel.push(k);
    }
    Some((particular, kernel))
}

/// Basis of the right kernel `{x : m x = 0}` as a saturated integer lattice.
pub fn kernel_int(m: &IntMat) -> Vec<IntVec> {
    let snf = smith_normal_form(m);
    let rank = (0..m.rows().min(m.cols()))
        .take_while(|&i| !snf.s.at(i, i).is_zero())
        .count();
    (rank..m.cols()).map(|j| snf.v.col_vec(j)).collect()
}

// ---------------------------------------------------------------------------
// lattices

/// A sublattice of some `Z^n`, stored by its canonical Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lattice {
    ambient_rank: usize,
    basis: IntMat, // full row rank, canonical HNF
}

impl Lattice {
    pub fn from_generators(gens: &[IntVec], ambient_rank: usize) -> Lattice {
        for g in gens {
            assert_eq!(g.len(), ambient_rank, "generator length mismatch");
        }
        let m = IntMat::from_rows(gens.to_vec(), ambient_rank);
        let hnf = hermite_normal_form(&m);
        let rows: Vec<IntVec> = hnf
            .h
            .row_iter()
            .filter(|r| !is_zero_vec(r))
            .map(|r| r.to_vec())
            .collect();
        let rank = rows.len();
        Lattice { ambient_rank, basis: IntMat::from_rows(rows, ambient_rank).with_cols(ambient_rank, rank) }
    }

    pub fn standard(n: usize) -> Lattice {
        Lattice { ambient_rank: n, basis: IntMat::identity(n) }
    }

    pub fn zero(ambient_rank: usize) -> Lattice {
        Lattice { ambient_rank, basis: IntMat::zero(0, ambient_rank) }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<IntVec> {
        self.basis.row_iter().map(|r| r.to_vec()).collect()
    }

    /// Integer coordinates of `v` in this basis, or `None` if `v` is not a
    /// lattice member.
    pub fn coordinates(&self, v: &[Int]) -> Option<IntVec> {
        assert_eq!(v.len(), self.ambient_rank);
        let a = self.basis.transpose().to_rat();
        let b = to_rat_vec(v);
        let (sol, _) = solve_affine(&a, &b)?;
        // residual check: basis rows are independent, but v may be off-span
        let check = self.basis.transpose().to_rat().mul_vec(&sol);
        if check != b {
            return None;
        }
        let mut out = Vec::with_capacity(sol.len());
        for x in sol {
            if !x.is_integer() {
                return None;
            }
            out.push(x.to_integer());
        }
        Some(out)
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }
}

// tiny helper so an empty from_rows keeps the right column count
trait WithCols {
    fn with_cols(self, cols: usize, rows: usize) -> IntMat;
}

impl WithCols for IntMat {
    fn with_cols(self, cols: usize, rows: usize) -> IntMat {
        if self.rows == rows && self.cols == cols {
            self
        } else {
            IntMat { rows, cols, data: self.data }
        }
    }
}

/// Index `[ambient : sub]` of the sublattice spanned by `sub_gens`.
///
/// Errors with `NotInLattice` if a generator is outside the ambient lattice
/// and `NotFullRank` if the generators do not span a finite-index sublattice.
pub fn lattice_index(sub_gens: &[IntVec], ambient: &Lattice) -> Result<Int, LinalgError> {
    let k = ambient.rank();
    let mut coords = Vec::with_capacity(sub_gens.len());
    for g in sub_gens {
        let c = ambient.coordinates(g).ok_or(LinalgError::NotInLattice)?;
        coords.push(c);
    }
    let m = IntMat::from_rows(coords, k);
    let snf = smith_normal_form(&m);
    let mut index = Int::one();
    for i in 0..k {
        if i >= m.rows() || snf.s.at(i, i).is_zero() {
            return Err(LinalgError::NotFullRank);
        }
        index *= snf.s.at(i, i);
    }
    Ok(index)
}

/// Saturation: the lattice of all integer points in the rational span of
/// the generators. Idempotent; the result contains the generated lattice
/// with finite index.
pub fn saturate(gens: &[IntVec], ambient_rank: usize) -> Lattice {
    for g in gens {
        assert_eq!(g.len(), ambient_rank, "generator length mismatch");
    }
    let nonzero: Vec<IntVec> = gens.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
    if nonzero.is_empty() {
        return Lattice::zero(ambient_rank);
    }
    // forms vanishing on the span, then integer points killed by all of them
    let g = IntMat::from_rows(nonzero, ambient_rank);
    let forms = kernel_int(&g);
    if forms.is_empty() {
        return Lattice::standard(ambient_rank);
    }
    let f = IntMat::from_rows(forms, ambient_rank);
    let points = kernel_int(&f);
    Lattice::from_generators(&points, ambient_rank)
}

/// Lcm of all denominators in a rational vector.
pub fn lcm_denoms(v: &[Rat]) -> Int {
    let mut l = Int::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    l
}

/// Pivot column (index of first nonzero entry) of a row, if any.
pub fn pivot_col(row: &[Int]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Zeroes out the pivot coordinates of `v` by subtracting rational
/// multiples of the given Hermite basis rows.
pub fn eliminate_pivots(v: &[Rat], hnf_rows: &[IntVec]) -> RatVec {
    let mut w = v.to_vec();
    for row in hnf_rows {
        let Some(p) = pivot_col(row) else { continue };
        if w[p].is_zero() {
            continue;
        }
        let c = &w[p] / Rat::from_integer(row[p].clone());
        for (wi, ri) in w.iter_mut().zip(row) {
            *wi -= &c * Rat::from_integer(ri.clone());
        }
    }
    w
}

/// Canonical primitive representative of the ray through `v` in the
/// quotient modulo the span of the given Hermite basis rows. Two integer
/// vectors that agree up to positive scaling and a span element map to the
/// same output; vectors inside the span are rejected as zero.
pub fn canonical_ray(v: &[Int], hnf_rows: &[IntVec]) -> Result<IntVec, LinalgError> {
    primitive_generator(&eliminate_pivots(&to_rat_vec(v), hnf_rows))
}

/// Canonical coset representative of `v` modulo the integer row span of
/// the given Hermite basis rows: each pivot coordinate is floor-reduced
/// into `[0, pivot)`.
pub fn reduce_mod_lattice(v: &[Int], hnf_rows: &[IntVec]) -> IntVec {
    let mut w = v.to_vec();
    for row in hnf_rows {
        let Some(p) = pivot_col(row) else { continue };
        let q = w[p].div_floor(&row[p]);
        if q.is_zero() {
            continue;
        }
        for (wi, ri) in w.iter_mut().zip(row) {
            *wi -= &q * ri;
        }
    }
    w
}
