//! Exhaustive search for a common extension of two conditions.
//!
//! The search fixes the order inside each input, decides every remaining pair
//! of the union (incomparable first, then the direction allowed by `pi`), sets
//! each new infimum to the maximal common lower bounds and accepts the first
//! candidate the validator passes. Up to two extra unit points drawn from the
//! interiors of cross walks may be added.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::forcing::condition::{validate, Condition};
use crate::forcing::point::{Eta, Point};
use crate::tree::IntervalTree;
use crate::universe::{SplitResult, UniverseSpec};
use crate::walks::walk;

/// Leaves tried across all pool choices before giving up.
pub const LEAF_BUDGET: usize = 50_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Exhausted {
    #[error("the inputs disagree on their shared points: {0}")]
    Incompatible(String),
    #[error("no common extension with at most {bound} points ({leaves} candidates tried)")]
    Bound { bound: usize, leaves: usize },
    #[error("search budget of {leaves} candidates spent")]
    Budget { leaves: usize },
}

struct Search<'a> {
    u: &'a UniverseSpec,
    t: &'a IntervalTree,
    s: &'a SplitResult,
    pa: &'a Condition,
    pb: &'a Condition,
    pts: Vec<Point>,
    /// `side[i]`: bit 0 when the point is in the first input, bit 1 for the second.
    side: Vec<u8>,
    leaves: usize,
}

fn close(up: &mut [u32]) {
    let n = up.len();
    for k in 0..n {
        for i in 0..n {
            if up[i] >> k & 1 == 1 {
                up[i] |= up[k];
            }
        }
    }
}

impl Search<'_> {
    fn fixed(&self, i: usize, j: usize) -> bool {
        self.side[i] & self.side[j] != 0
    }

    /// The closure must not relate a pair that one input keeps apart.
    fn consistent(&self, up: &[u32], apart: &[(usize, usize)]) -> bool {
        let n = self.pts.len();
        for i in 0..n {
            if up[i] >> i & 1 == 1 {
                return false;
            }
            for j in 0..n {
                if up[i] >> j & 1 == 1 && self.fixed(i, j) {
                    let inside = |c: &Condition| !c.contains(&self.pts[i]) || !c.contains(&self.pts[j]) || c.lt(&self.pts[i], &self.pts[j]);
                    if !inside(self.pa) || !inside(self.pb) {
                        return false;
                    }
                }
            }
        }
        apart.iter().all(|&(i, j)| up[i] >> j & 1 == 0 && up[j] >> i & 1 == 0)
    }

    fn build(&self, up: &[u32]) -> Condition {
        let n = self.pts.len();
        let mut c = Condition::new();
        for p in &self.pts {
            c.insert_point(p.clone());
        }
        for i in 0..n {
            for j in 0..n {
                if up[i] >> j & 1 == 1 {
                    c.insert_lt(self.pts[i].clone(), self.pts[j].clone());
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&self.pts[i], &self.pts[j]);
                let v = if c.lt(a, b) {
                    [a.clone()].into()
                } else if c.lt(b, a) {
                    [b.clone()].into()
                } else if self.fixed(i, j) {
                    let src = if self.side[i] & self.side[j] & 1 == 1 { self.pa } else { self.pb };
                    src.inf(a, b)
                } else {
                    let lower = c.common_lower(a, b);
                    lower.iter().filter(|w| !lower.iter().any(|x| c.lt(w, x))).cloned().collect()
                };
                c.set_inf(a, b, v);
            }
        }
        c
    }

    fn run(&mut self, up: Vec<u32>, apart: Vec<(usize, usize)>, from: usize) -> Option<Condition> {
        if self.leaves >= LEAF_BUDGET {
            return None;
        }
        let n = self.pts.len();
        let next = (from..n * n).find(|&k| {
            let (i, j) = (k / n, k % n);
            i < j && !self.fixed(i, j) && up[i] >> j & 1 == 0 && up[j] >> i & 1 == 0
        });
        let Some(k) = next else {
            self.leaves += 1;
            let c = self.build(&up);
            let ok = c.extends(self.pa) && c.extends(self.pb) && validate(self.u, self.t, self.s, &c).is_ok();
            return ok.then_some(c);
        };
        let (i, j) = (k / n, k % n);
        let mut apart2 = apart.clone();
        apart2.push((i, j));
        if let Some(c) = self.run(up.clone(), apart2, k + 1) {
            return Some(c);
        }
        let (lo, hi) = match self.pts[i].pi.cmp(&self.pts[j].pi) {
            std::cmp::Ordering::Less => (i, j),
            std::cmp::Ordering::Greater => (j, i),
            std::cmp::Ordering::Equal => return None,
        };
        let mut up2 = up;
        up2[lo] |= 1 << hi;
        close(&mut up2);
        if self.consistent(&up2, &apart) {
            return self.run(up2, apart, k + 1);
        }
        None
    }
}

/// Interior walk values between points of the two private parts, each as a
/// unit point with a fresh index.
fn pool(t: &IntervalTree, pa: &Condition, pb: &Condition) -> Vec<Point> {
    let fresh = pa.unit_etas().chain(pb.unit_etas()).max().map_or(0, |m| m + 1);
    let only_a: Vec<&Point> = pa.points().iter().filter(|x| !pb.contains(x)).collect();
    let only_b: Vec<&Point> = pb.points().iter().filter(|x| !pa.contains(x)).collect();
    let mut vals = BTreeSet::new();
    for a in &only_a {
        for b in &only_b {
            let (lo, hi) = if a.pi < b.pi { (&a.pi, &b.pi) } else { (&b.pi, &a.pi) };
            if lo == hi {
                continue;
            }
            if let Ok(w) = walk(t, lo, hi) {
                vals.extend(w.seq.into_iter().filter(|v| v != lo && v != hi));
            }
        }
    }
    vals.into_iter().take(8).map(|v| Point { pi: v, eta: Eta::Nat(fresh) }).collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    match k {
        0 => vec![vec![]],
        1 => (0..n).map(|i| vec![i]).collect(),
        _ => (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect(),
    }
}

/// A validating common extension of `pa` and `pb` with at most `bound` points.
pub fn brute_force_common_extension(
    u: &UniverseSpec,
    t: &IntervalTree,
    s: &SplitResult,
    pa: &Condition,
    pb: &Condition,
    bound: usize,
) -> Result<Condition, Exhausted> {
    if pa == pb {
        return Ok(pa.clone());
    }
    let shared: Vec<&Point> = pa.points().intersection(pb.points()).collect();
    for a in &shared {
        for b in &shared {
            if pa.lt(a, b) != pb.lt(a, b) {
                return Err(Exhausted::Incompatible(format!("{a} < {b} holds in only one input")));
            }
            if a < b && pa.inf(a, b) != pb.inf(a, b) {
                return Err(Exhausted::Incompatible(format!("inf {{{a}, {b}}} differs")));
            }
        }
    }
    let union: Vec<Point> = pa.points().union(pb.points()).cloned().collect();
    let extra = pool(t, pa, pb);
    let mut leaves = 0;
    for k in 0..=2usize {
        if union.len() + k > bound || union.len() + k > 32 {
            break;
        }
        for pick in subsets(extra.len(), k) {
            let mut pts = union.clone();
            pts.extend(pick.iter().map(|&i| extra[i].clone()));
            let side: Vec<u8> = pts.iter().map(|p| pa.contains(p) as u8 | (pb.contains(p) as u8) << 1).collect();
            let mut up = vec![0u32; pts.len()];
            for (i, a) in pts.iter().enumerate() {
                for (j, b) in pts.iter().enumerate() {
                    if pa.lt(a, b) || pb.lt(a, b) {
                        up[i] |= 1 << j;
                    }
                }
            }
            close(&mut up);
            let mut search = Search { u, t, s, pa, pb, pts, side, leaves };
            if !search.consistent(&up, &[]) {
                return Err(Exhausted::Incompatible("the union of the two orders is not a partial order extending both".into()));
            }
            let found = search.run(up, vec![], 0);
            leaves = search.leaves;
            if let Some(c) = found {
                return Ok(c);
            }
            if leaves >= LEAF_BUDGET {
                return Err(Exhausted::Budget { leaves });
            }
        }
    }
    Err(Exhausted::Bound { bound, leaves })
}
