//! Extension operations: adding a point, and adding a fresh unit point below a
//! given point together with the walk scaffold that makes the result valid.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::forcing::condition::{validate, walk_realized, Condition};
use crate::forcing::point::{BlockId, Eta, Point, PointError};
use crate::ordinal::Ordinal;
use crate::report::Report;
use crate::tree::IntervalTree;
use crate::universe::{SplitResult, UniverseSpec};
use crate::walks::{walk, WalkError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    #[error("{0} is already in the condition")]
    AlreadyPresent(Point),
    #[error("{0} is not in the condition")]
    TargetMissing(Point),
    #[error("{alpha} is not below pi({target})")]
    AlphaNotBelow { alpha: Ordinal, target: Point },
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    /// Walks from the new point up to the target force an unbounded chain of points.
    #[error("walks from {from} to {to} force more than the scaffold cap of new points")]
    NoFiniteScaffold { from: Point, to: Point },
    #[error("extension failed validation: {0}")]
    Invalid(Report),
}

/// Sets `i{x, y}` for every new point `x`: the lower point when comparable, else empty.
fn fill_inf(q: &mut Condition, new: &[Point]) {
    let all: Vec<Point> = q.points().iter().cloned().collect();
    for x in new {
        for y in &all {
            if x == y {
                continue;
            }
            if q.lt(x, y) {
                q.set_inf(x, y, [x.clone()].into());
            } else if q.lt(y, x) {
                q.set_inf(x, y, [y.clone()].into());
            } else {
                q.set_inf(x, y, BTreeSet::new());
            }
        }
    }
}

/// Adds `y`; a block point brings its top along.
pub fn add_point(u: &UniverseSpec, s: &SplitResult, p: &Condition, y: &Point) -> Result<Condition, DensityError> {
    y.check_in_y(u, s)?;
    if p.contains(y) {
        return Err(DensityError::AlreadyPresent(y.clone()));
    }
    let mut q = p.clone();
    q.insert_point(y.clone());
    let mut new = vec![y.clone()];
    if let Eta::Block { alpha, zeta, .. } = &y.eta {
        let top = Point::top(s, alpha, *zeta);
        if q.insert_point(top.clone()) {
            new.push(top.clone());
        }
        q.insert_lt(y.clone(), top);
    }
    fill_inf(&mut q, &new);
    Ok(q)
}

/// Least `n` above `j` and above every unit-point index in `p`.
fn fresh_index(p: &Condition, j: u32) -> u32 {
    p.unit_etas().map(|n| n + 1).max().unwrap_or(0).max(j + 1)
}

/// Least block index above `j` and above every index used in block `bid`.
fn fresh_block_index(p: &Condition, bid: &BlockId, j: u32) -> u32 {
    p.points()
        .iter()
        .filter_map(|x| match &x.eta {
            Eta::Block { n, .. } if &x.block_id() == bid => Some(n + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        .max(j + 1)
}

/// Most new points a single extension may create before giving up.
pub const SCAFFOLD_CAP: usize = 32;

/// Values forced below `top` by walks from `alpha`: closes `{alpha}` under
/// "interior entries of `w(c, top)`" for each target in `tops`. `None` once the
/// closure outgrows [`SCAFFOLD_CAP`]. No point of a valid condition can sit at
/// a value of an unbounded closure, so such a request has no finite answer.
fn forced_values(t: &IntervalTree, alpha: &Ordinal, tops: &[&Ordinal]) -> Result<Option<BTreeSet<Ordinal>>, DensityError> {
    let mut done: BTreeSet<Ordinal> = BTreeSet::new();
    let mut todo = vec![alpha.clone()];
    while let Some(c) = todo.pop() {
        if !done.insert(c.clone()) {
            continue;
        }
        if done.len() > SCAFFOLD_CAP {
            return Ok(None);
        }
        for top in tops {
            if &c >= *top {
                continue;
            }
            let w = walk(t, &c, top)?;
            todo.extend(w.seq[1..w.seq.len() - 1].iter().filter(|v| v < top && !done.contains(*v)).cloned());
        }
    }
    Ok(Some(done))
}

/// Puts `x` strictly below `b` and below everything above `b`.
fn put_below(q: &mut Condition, x: &Point, b: &Point) {
    q.insert_lt(x.clone(), b.clone());
    for v in q.above(b) {
        q.insert_lt(x.clone(), v);
    }
}

/// Repairs one unrealized walk `a < b` with `a` new: reuses a chain of points
/// already below `b` for the upper part of the walk and adds fresh `<v, n>` for
/// the rest. Returns false when the walk was already realized.
fn repair(t: &IntervalTree, q: &mut Condition, new: &mut BTreeSet<Point>, a: &Point, b: &Point, n: u32) -> Result<bool, DensityError> {
    let w = walk(t, &a.pi, &b.pi)?;
    if walk_realized(q, a, b, &w.seq) {
        return Ok(false);
    }
    let mut anchor = b.clone();
    if b.in_u2() {
        if let Some(m) = q.points().iter().find(|m| m.in_u1() && m.block_id() == b.block_id() && q.lt(a, m) && q.lt(m, b)) {
            anchor = m.clone();
        }
    }
    let values: BTreeSet<Ordinal> = w.seq[1..w.seq.len() - 1].iter().filter(|v| **v > a.pi && **v < anchor.pi).cloned().collect();
    let values: Vec<Ordinal> = values.into_iter().collect();
    let mut cur = anchor.clone();
    let mut cut = values.len();
    while cut > 0 {
        let v = &values[cut - 1];
        let pick = {
            let mut c: Vec<&Point> = q.points().iter().filter(|x| &x.pi == v && q.lt(x, &cur)).collect();
            c.sort_by_key(|x| !q.lt(a, x));
            c.first().map(|x| (*x).clone())
        };
        match pick {
            Some(x) => {
                cur = x;
                cut -= 1;
            }
            None => break,
        }
    }
    let mut lower = a.clone();
    for v in &values[..cut] {
        let c = Point::unit(v.clone(), n);
        if q.insert_point(c.clone()) {
            new.insert(c.clone());
        }
        q.insert_lt(lower.clone(), c.clone());
        lower = c;
    }
    put_below(q, &lower, &cur);
    q.close_order();
    Ok(true)
}

/// Infima for every pair touching a new point: the lower point when comparable,
/// otherwise the maximal common lower bounds.
fn fill_inf_general(q: &mut Condition, new: &BTreeSet<Point>) {
    let all: Vec<Point> = q.points().iter().cloned().collect();
    for x in new {
        for y in &all {
            if x == y {
                continue;
            }
            let v = if q.lt(x, y) {
                [x.clone()].into()
            } else if q.lt(y, x) {
                [y.clone()].into()
            } else {
                let lower = q.common_lower(x, y);
                lower.iter().filter(|u| !lower.iter().any(|w| q.lt(u, w))).cloned().collect()
            };
            q.set_inf(x, y, v);
        }
    }
}

/// Adds a new point `<alpha, n>` with `n > j` strictly below `tgt`, and returns
/// the extension together with that point.
///
/// The new point starts directly below `tgt` (below a block point of `tgt`'s
/// block when `tgt` is a top); every walk from a new unit point that the
/// condition does not yet realize is then filled in with fresh points of the
/// same index `n`. Below a block top whose block sits exactly at `alpha` no unit
/// point can work, so a fresh block point at `alpha` is added instead.
pub fn extend_below(
    u: &UniverseSpec,
    t: &IntervalTree,
    s: &SplitResult,
    p: &Condition,
    tgt: &Point,
    alpha: &Ordinal,
    j: u32,
) -> Result<(Condition, Point), DensityError> {
    if !p.contains(tgt) {
        return Err(DensityError::TargetMissing(tgt.clone()));
    }
    if alpha >= &tgt.pi {
        return Err(DensityError::AlphaNotBelow { alpha: alpha.clone(), target: tgt.clone() });
    }
    let mut q = p.clone();
    let mut new = BTreeSet::new();
    let n = fresh_index(p, j);
    let mut anchor = tgt.clone();
    if let Eta::Top { alpha: owner, zeta } = &tgt.eta {
        let bid = tgt.block_id();
        let g = &s.gamma_of[owner];
        let m = fresh_block_index(p, &bid, if alpha == g { j } else { 0 });
        let fresh_block = Point::block(s, owner, *zeta, m);
        let existing = p.points().iter().find(|x| x.in_u1() && x.block_id() == bid).cloned();
        match existing {
            Some(x) if alpha != g => anchor = x,
            _ => {
                q.insert_point(fresh_block.clone());
                q.insert_lt(fresh_block.clone(), tgt.clone());
                new.insert(fresh_block.clone());
                if alpha == g {
                    fill_inf_general(&mut q, &new);
                    return finish(u, t, s, q, fresh_block);
                }
                anchor = fresh_block;
            }
        }
    }
    let mut tops = vec![&anchor.pi];
    let top_pi;
    if anchor.in_u1() {
        top_pi = anchor.pi.succ();
        tops.push(&top_pi);
    }
    if forced_values(t, alpha, &tops)?.is_none() {
        return Err(DensityError::NoFiniteScaffold { from: Point::unit(alpha.clone(), n), to: anchor.clone() });
    }
    let first = Point::unit(alpha.clone(), n);
    q.insert_point(first.clone());
    new.insert(first.clone());
    put_below(&mut q, &first, &anchor);
    q.close_order();
    'outer: loop {
        let pending: Vec<(Point, Point)> = q.less_iter().filter(|(a, _)| a.is_unit() && new.contains(*a)).map(|(a, b)| (a.clone(), b.clone())).collect();
        for (a, b) in pending {
            if repair(t, &mut q, &mut new, &a, &b, n)? {
                if new.len() > SCAFFOLD_CAP {
                    return Err(DensityError::NoFiniteScaffold { from: a, to: b });
                }
                continue 'outer;
            }
        }
        break;
    }
    fill_inf_general(&mut q, &new);
    finish(u, t, s, q, first)
}

fn finish(u: &UniverseSpec, t: &IntervalTree, s: &SplitResult, q: Condition, x: Point) -> Result<(Condition, Point), DensityError> {
    let r = validate(u, t, s, &q);
    if !r.is_ok() {
        return Err(DensityError::Invalid(r));
    }
    Ok((q, x))
}
