//! Streams the combinatorial types of a counting problem without
//! materializing them.
//!
//! Types are grown by leaf insertion. The ends carrying the degree
//! directions are placed first, so every edge direction is final once
//! they are all in, and the contracted ends are inserted afterwards
//! without changing any direction. When the caller's systems cannot
//! use an edge of direction zero (such an edge zeroes a column of
//! every system), whole branches that force one are pruned: skeletons
//! with a zero edge are dropped once the degree ends are placed, and a
//! contracted end is never hung off another contracted end.
//!
//! Each insertion history reaches a distinct type and every type on
//! the given number of ends is reached, so the stream enumerates types
//! exactly once.

use super::EnumError;

/// One bounded edge of a combinatorial type under construction.
#[derive(Debug, Clone)]
pub(crate) struct Edge {
    /// ends on the far side of the edge, as seen from end `0`
    pub far: u64,
    /// sum of the degree directions over the far side
    pub dir: Vec<i64>,
}

/// Calls `visit` once per trivalent type on `total` ends, where the
/// first `deltas.len()` ends carry the given directions and the rest
/// are contracted. `prune_zero` skips branches whose types cannot
/// contribute to a count.
pub(crate) fn for_each_type(
    deltas: &[Vec<i64>],
    r: usize,
    total: usize,
    prune_zero: bool,
    visit: &mut impl FnMut(&[Edge]) -> Result<(), EnumError>,
) -> Result<(), EnumError> {
    assert!((3..=64).contains(&total), "end count out of range");
    assert!(deltas.len() <= total, "more directions than ends");
    let mut all_deltas: Vec<Vec<i64>> = deltas.to_vec();
    all_deltas.resize(total, vec![0; r]);
    let mut state = State {
        deltas: all_deltas,
        m: deltas.len(),
        total,
        // a zero direction can only be used by a cross-ratio row, and
        // with no degree ends at all every direction is zero anyway
        prune_zero: prune_zero && !deltas.is_empty(),
        check_at: deltas.len().max(3),
        edges: Vec::new(),
        placed_sum: (0..3.min(deltas.len())).fold(vec![0i64; r], |acc, k| add(&acc, &deltas[k])),
    };
    state.recurse(3, visit)
}

struct State {
    deltas: Vec<Vec<i64>>,
    m: usize,
    total: usize,
    prune_zero: bool,
    check_at: usize,
    edges: Vec<Edge>,
    /// running sum of the directions of all placed ends
    placed_sum: Vec<i64>,
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn add_into(a: &mut [i64], b: &[i64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn sub_into(a: &mut [i64], b: &[i64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x -= y;
    }
}

impl State {
    fn recurse(
        &mut self,
        next: usize,
        visit: &mut impl FnMut(&[Edge]) -> Result<(), EnumError>,
    ) -> Result<(), EnumError> {
        if self.prune_zero
            && next == self.check_at
            && self.edges.iter().any(|e| e.dir.iter().all(|&x| x == 0))
        {
            return Ok(());
        }
        if next == self.total {
            return visit(&self.edges);
        }
        let bit = 1u64 << next;
        let delta = self.deltas[next].clone();
        // hanging the new end off end 0 puts every previously placed
        // end except 0 on the far side of the fresh edge; the new end
        // itself sits on the near side with 0
        let top_dir = {
            let mut d = self.placed_sum.clone();
            sub_into(&mut d, &self.deltas[0]);
            d
        };
        let top_far = (bit - 1) ^ 1;
        add_into(&mut self.placed_sum, &delta);

        // split an existing bounded edge
        for e in 0..self.edges.len() {
            let inner = self.edges[e].far;
            for k in 0..self.edges.len() {
                if inner & !self.edges[k].far == 0 && self.edges[k].far != inner {
                    self.edges[k].far |= bit;
                    add_into(&mut self.edges[k].dir, &delta);
                }
            }
            let dir = add(&self.edges[e].dir, &delta);
            self.edges.push(Edge {
                far: inner | bit,
                dir,
            });
            self.recurse(next + 1, visit)?;
            self.edges.pop();
            for k in 0..self.edges.len() {
                if self.edges[k].far & bit != 0 {
                    self.edges[k].far &= !bit;
                    sub_into(&mut self.edges[k].dir, &delta);
                }
            }
        }

        // hang the new end off an existing end
        for l in 1..next {
            if self.prune_zero && l >= self.m && next >= self.m {
                continue;
            }
            let lbit = 1u64 << l;
            for k in 0..self.edges.len() {
                if self.edges[k].far & lbit != 0 {
                    self.edges[k].far |= bit;
                    add_into(&mut self.edges[k].dir, &delta);
                }
            }
            self.edges.push(Edge {
                far: lbit | bit,
                dir: add(&self.deltas[l], &delta),
            });
            self.recurse(next + 1, visit)?;
            self.edges.pop();
            for k in 0..self.edges.len() {
                if self.edges[k].far & bit != 0 {
                    self.edges[k].far &= !bit;
                    sub_into(&mut self.edges[k].dir, &delta);
                }
            }
        }

        // hang the new end off end 0
        self.edges.push(Edge {
            far: top_far,
            dir: top_dir,
        });
        self.recurse(next + 1, visit)?;
        self.edges.pop();

        sub_into(&mut self.placed_sum, &delta);
        Ok(())
    }
}
