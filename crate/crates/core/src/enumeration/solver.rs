//! Exact solver for the square integer systems a counting problem
//! produces, one per combinatorial type.
//!
//! Systems are eliminated fraction-free, so the determinant and the
//! Cramer numerators of the solution come out as exact integers. The
//! fixed-width path covers realistic coefficient sizes; anything that
//! overflows is redone in big integers.

use num_traits::Zero;

use crate::linalg::Int;

/// Outcome of solving a square system `a x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    /// invertible system; `x[i] = numerators[i] / det` exactly
    Unique { det: Int, numerators: Vec<Int> },
    /// singular with at least one solution
    SingularConsistent,
    /// singular with no solution
    SingularInconsistent,
}

/// Solves a square integer system exactly.
pub(crate) fn solve_square(a: &[Vec<i128>], b: &[i128]) -> Outcome {
    solve_i128(a, b).unwrap_or_else(|| solve_big(a, b))
}

/// Fixed-width elimination; `None` signals overflow.
fn solve_i128(a: &[Vec<i128>], b: &[i128]) -> Option<Outcome> {
    let n = a.len();
    if n == 0 {
        return Some(Outcome::Unique {
            det: Int::from(1),
            numerators: Vec::new(),
        });
    }
    // augmented working copy, eliminated in place
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            debug_assert_eq!(row.len(), n, "system must be square");
            let mut w = row.clone();
            w.push(rhs);
            w
        })
        .collect();
    let mut prev: i128 = 1;
    let mut rank = 0;
    let mut sign: i128 = 1;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&i| m[i][col] != 0) else {
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            sign = -sign;
        }
        let pivot = m[rank][col];
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let lead = row[col];
            for (x, &p) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                let num = x.checked_mul(pivot)?.checked_sub(lead.checked_mul(p)?)?;
                debug_assert_eq!(num % prev, 0, "fraction-free step must divide");
                *x = num / prev;
            }
            row[col] = 0;
        }
        prev = pivot;
        rank += 1;
        if rank == n {
            break;
        }
    }
    if rank < n {
        let consistent = (rank..n).all(|i| m[i][n] == 0);
        return Some(if consistent {
            Outcome::SingularConsistent
        } else {
            Outcome::SingularInconsistent
        });
    }
    // back substitution scaled by the determinant keeps everything integral
    let unsigned_det = m[n - 1][n - 1];
    let mut nums = vec![0i128; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].checked_mul(unsigned_det)?;
        for (j, &num_j) in nums.iter().enumerate().skip(i + 1) {
            acc = acc.checked_sub(m[i][j].checked_mul(num_j)?)?;
        }
        debug_assert_eq!(acc % m[i][i], 0, "scaled solution must be integral");
        nums[i] = acc / m[i][i];
    }
    Some(Outcome::Unique {
        det: Int::from(sign * unsigned_det),
        numerators: nums.into_iter().map(|x| Int::from(sign * x)).collect(),
    })
}

/// Big-integer fallback with the same elimination.
fn solve_big(a: &[Vec<i128>], b: &[i128]) -> Outcome {
    let n = a.len();
    let mut m: Vec<Vec<Int>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut w: Vec<Int> = row.iter().map(|&x| Int::from(x)).collect();
            w.push(Int::from(rhs));
            w
        })
        .collect();
    let mut prev = Int::from(1);
    let mut rank = 0;
    let mut flip = false;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            flip = !flip;
        }
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let lead = row[col].clone();
            for (x, p) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                let num = &*x * &pivot_row[col] - &lead * p;
                *x = num / &prev;
            }
            row[col] = Int::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == n {
            break;
        }
    }
    if rank < n {
        let consistent = (rank..n).all(|i| m[i][n].is_zero());
        return if consistent {
            Outcome::SingularConsistent
        } else {
            Outcome::SingularInconsistent
        };
    }
    let unsigned_det = m[n - 1][n - 1].clone();
    let mut nums = vec![Int::zero(); n];
    for i in (0..n).rev() {
        let mut acc = &m[i][n] * &unsigned_det;
        for (j, num_j) in nums.iter().enumerate().skip(i + 1) {
            acc -= &m[i][j] * num_j;
        }
        nums[i] = acc / &m[i][i];
    }
    let fix = |x: Int| if flip { -x } else { x };
    Outcome::Unique {
        det: fix(unsigned_det),
        numerators: nums.into_iter().map(fix).collect(),
    }
}
