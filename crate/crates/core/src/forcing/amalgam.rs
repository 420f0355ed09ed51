//! Pairwise thinning profile, admissibility, the amalgam of two conditions, and
//! the interval-transfer and separating-interval properties used to validate it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::delta::{adequacy_check, h_pair};
use crate::forcing::condition::Condition;
use crate::forcing::point::{BlockId, Point};
use crate::ordinal::Ordinal;
use crate::report::Report;
use crate::tree::{Interval, IntervalTree, TreeError};
use crate::universe::{SplitResult, UniverseSpec};
use crate::walks::{separation, WalkError};

pub type PointMap = BTreeMap<Point, Point>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    #[error("pair fails the thinning profile: {0}")]
    ProfileInvalid(Report),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// How a non-top point of the first condition relates to its image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PointClass {
    /// In the kernel.
    Kernel,
    /// Unit point whose image sits at another level.
    MovedUnit,
    /// Block point whose image sits at the same level in another block.
    SameLevel,
    /// Block point whose image sits at another level.
    MovedBlock,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThinningProfile {
    pub kernel: BTreeSet<Point>,
    pub blocks_a: BTreeSet<BlockId>,
    pub blocks_b: BTreeSet<BlockId>,
    pub g: PointMap,
    pub classes: BTreeMap<Point, PointClass>,
    /// `pi` of the kernel, of each side.
    pub a: BTreeSet<Ordinal>,
    pub a_a: BTreeSet<Ordinal>,
    pub a_b: BTreeSet<Ordinal>,
    /// `pi` of the non-kernel unit and block points of each side.
    pub c_a: BTreeSet<Ordinal>,
    pub c_b: BTreeSet<Ordinal>,
}

fn unit_at<'a>(p: &'a Condition, alpha: &'a Ordinal) -> impl Iterator<Item = &'a Point> + 'a {
    p.points().iter().filter(move |x| x.is_unit() && &x.pi == alpha)
}

fn traces(p: &Condition, kernel: &BTreeSet<Point>) -> BTreeSet<Ordinal> {
    p.points().iter().filter(|x| !kernel.contains(*x) && !x.in_u2()).map(|x| x.pi.clone()).collect()
}

/// Checks every thinning clause for the pair `(pa, pb)` joined by `g : x_a -> x_b`.
pub fn thinning_check(t: &IntervalTree, s: &SplitResult, pa: &Condition, pb: &Condition, g: &PointMap) -> Result<ThinningProfile, Report> {
    let mut r = Report::new();
    let xa = pa.points();
    let xb = pb.points();
    let kernel: BTreeSet<Point> = xa.intersection(xb).cloned().collect();

    let dom: BTreeSet<&Point> = g.keys().collect();
    r.check(dom == xa.iter().collect(), "map-domain", || "g is not defined exactly on the first condition".into());
    let img: BTreeSet<&Point> = g.values().collect();
    r.check(img.len() == g.len() && img == xb.iter().collect(), "map-bijective", || "g is not a bijection onto the second condition".into());
    if !r.is_ok() {
        return Err(r);
    }

    r.check(xa.len() == xb.len(), "A-a", || format!("sizes {} and {}", xa.len(), xb.len()));
    let levels: BTreeSet<&Ordinal> = xa.iter().chain(xb.iter()).filter(|x| x.is_unit()).map(|x| &x.pi).collect();
    for alpha in levels {
        let ka: BTreeSet<&Point> = unit_at(pa, alpha).collect();
        let kb: BTreeSet<&Point> = unit_at(pb, alpha).collect();
        let kx: BTreeSet<&Point> = ka.intersection(&kb).cloned().collect();
        let same = ka == kx && kb == kx;
        r.check(same || ka.is_empty() || kb.is_empty(), "A-b", || format!("both sides add unit points at {alpha}"));
    }

    let blocks_a: BTreeSet<BlockId> = xa.iter().map(|x| x.block_id()).collect();
    let blocks_b: BTreeSet<BlockId> = xb.iter().map(|x| x.block_id()).collect();
    r.check(blocks_a.len() == blocks_b.len(), "B-a", || format!("{} blocks met against {}", blocks_a.len(), blocks_b.len()));
    for bid in kernel.iter().map(|x| x.block_id()).filter(|b| *b != BlockId::Unit).collect::<BTreeSet<_>>() {
        let part = |set: &BTreeSet<Point>| -> BTreeSet<Point> { set.iter().filter(|x| x.block_id() == bid).cloned().collect() };
        let (pk, pa_, pb_) = (part(&kernel), part(xa), part(xb));
        r.check(pa_ == pk && pb_ == pk, "B-b", || format!("block {bid} meets the kernel but differs between the sides"));
    }
    for (this, other, name) in [(pa, pb, "first"), (pb, pa, "second")] {
        for bid in this.points().iter().map(|x| x.block_id()) {
            let BlockId::Pair { alpha, .. } = &bid else { continue };
            let above = s.gamma_of[alpha].succ();
            if unit_at(this, &above).next().is_none() {
                r.check(unit_at(other, &above).next().is_none(), "B-c", || {
                    format!("{name} side meets {bid} with no unit point at {above}, the other side has one")
                });
            }
        }
    }

    for x in &kernel {
        r.check(g[x] == *x, "C-1", || format!("g moves kernel point {x}"));
    }
    let pts: Vec<&Point> = xa.iter().collect();
    for (k, a) in pts.iter().enumerate() {
        let (a, ga) = (*a, &g[*a]);
        r.check(a.is_unit() == ga.is_unit(), "C-4", || format!("{a} and {ga} differ in being unit points"));
        r.check(a.in_u2() == ga.in_u2(), "C-5", || format!("{a} and {ga} differ in being tops"));
        match (t.first_level(&a.pi), t.first_level(&ga.pi)) {
            (Ok(la), Ok(lb)) => r.check(la == lb, "C-8", || format!("l({}) = {la} but l({}) = {lb}", a.pi, ga.pi)),
            _ => r.push("C-8", format!("no first level for {a} or {ga}")),
        }
        for b in &pts[k + 1..] {
            let (b, gb) = (*b, &g[*b]);
            r.check(pa.lt(a, b) == pb.lt(ga, gb) && pa.lt(b, a) == pb.lt(gb, ga), "C-order", || format!("g breaks the order between {a} and {b}"));
            let mapped: BTreeSet<Point> = pa.inf(a, b).iter().map(|v| g[v].clone()).collect();
            r.check(mapped == pb.inf(ga, gb), "C-inf", || format!("g does not carry i{{{a}, {b}}} onto i{{{ga}, {gb}}}"));
            r.check((a.block_id() == b.block_id()) == (ga.block_id() == gb.block_id()), "C-3", || format!("g breaks block equality of {a}, {b}"));
            r.check((a.pi_minus() == b.pi_minus()) == (ga.pi_minus() == gb.pi_minus()), "C-6", || format!("g breaks lower-projection equality of {a}, {b}"));
            if kernel.contains(a) && kernel.contains(b) {
                r.check(pa.inf(a, b) == pb.inf(a, b), "C-7", || format!("i{{{a}, {b}}} differs on the kernel"));
            }
        }
    }

    let mut classes = BTreeMap::new();
    for a in xa.iter().filter(|x| !x.in_u2()) {
        let ga = &g[a];
        let class = if kernel.contains(a) {
            Some(PointClass::Kernel)
        } else if a.is_unit() {
            (a.pi != ga.pi).then_some(PointClass::MovedUnit)
        } else if a.pi == ga.pi {
            (a.block_id() != ga.block_id()).then_some(PointClass::SameLevel)
        } else {
            Some(PointClass::MovedBlock)
        };
        match class {
            Some(c) => {
                classes.insert(a.clone(), c);
            }
            None => r.push("D", format!("{a} and its image {ga} fit no class")),
        }
    }

    if !r.is_ok() {
        return Err(r);
    }
    Ok(ThinningProfile {
        a: kernel.iter().map(|x| x.pi.clone()).collect(),
        a_a: xa.iter().map(|x| x.pi.clone()).collect(),
        a_b: xb.iter().map(|x| x.pi.clone()).collect(),
        c_a: traces(pa, &kernel),
        c_b: traces(pb, &kernel),
        kernel,
        blocks_a,
        blocks_b,
        g: g.clone(),
        classes,
    })
}

/// For every interval along the traces whose right end is a big point, the
/// traces' intersections with `E(I)` must form an adequate family for `G_I`.
/// `gi(e, a, b)` evaluates `G_I{a, b}` given the relevant prefix `e` of `E(I)`.
pub fn admissible_check<G>(u: &UniverseSpec, t: &IntervalTree, traces: &[BTreeSet<Ordinal>], gi: G) -> Result<Report, AmalgamError>
where
    G: Fn(&BTreeSet<Ordinal>, &Ordinal, &Ordinal) -> BTreeSet<Ordinal>,
{
    let mut r = Report::new();
    let mut seen: BTreeSet<Interval> = BTreeSet::new();
    for c in traces {
        for x in c {
            let depth = t.first_level(x)?;
            for i in t.path(x, depth)? {
                if !u.big.contains(&i.hi) || !seen.insert(i.clone()) {
                    continue;
                }
                let e = t.e_seq(&i)?;
                let fam: Vec<BTreeSet<Ordinal>> = traces.iter().map(|c| c.iter().filter(|v| i.contains(v) && e.contains(v)).cloned().collect()).collect();
                if fam.iter().all(|f| f.is_empty()) {
                    continue;
                }
                let bound = fam.iter().flatten().max().expect("non-empty").succ();
                let es: BTreeSet<Ordinal> = e.elements_below(&bound, usize::MAX).into_iter().collect();
                match adequacy_check(&fam, |a, b| gi(&es, a, b)) {
                    Ok(rep) => {
                        for v in rep.violations {
                            r.push("admissible", format!("at {i}: clause ({}) fails for {}, {} over {}", v.clause, v.alpha, v.beta, v.tau));
                        }
                    }
                    Err(e) => r.push("admissible", format!("at {i}: {e}")),
                }
            }
        }
    }
    Ok(r)
}

/// The amalgam `<x_a ∪ x_b, ⪯, i>`. Cross pairs get the lower point when
/// comparable and otherwise the common lower bounds whose level lies in `h`.
pub fn amalgamate(t: &IntervalTree, s: &SplitResult, pa: &Condition, pb: &Condition, g: &PointMap) -> Result<Condition, AmalgamError> {
    thinning_check(t, s, pa, pb, g).map_err(AmalgamError::ProfileInvalid)?;
    let mut z = Condition::new();
    for x in pa.points().iter().chain(pb.points()) {
        z.insert_point(x.clone());
    }
    for (a, b) in pa.less_iter().chain(pb.less_iter()) {
        z.insert_lt(a.clone(), b.clone());
    }
    z.close_order();
    let pts: Vec<Point> = z.points().iter().cloned().collect();
    for (k, a) in pts.iter().enumerate() {
        for b in &pts[k + 1..] {
            let v = if pa.contains(a) && pa.contains(b) {
                pa.inf(a, b)
            } else if pb.contains(a) && pb.contains(b) {
                pb.inf(a, b)
            } else if z.lt(a, b) {
                [a.clone()].into()
            } else if z.lt(b, a) {
                [b.clone()].into()
            } else {
                let lower = z.common_lower(a, b);
                if lower.is_empty() {
                    BTreeSet::new()
                } else {
                    let h = h_pair(t, a, b)?;
                    lower.into_iter().filter(|w| h.contains(&w.pi)).collect()
                }
            };
            z.set_inf(a, b, v);
        }
    }
    Ok(z)
}

/// Interval co-membership transfers along `g` for every `u < v` among unit and
/// block points of the first condition.
pub fn check_interval_transfer(t: &IntervalTree, pa: &Condition, g: &PointMap) -> Result<(Report, usize), AmalgamError> {
    let mut r = Report::new();
    let mut n = 0;
    for (u, v) in pa.less_iter() {
        if u.in_u2() || v.in_u2() {
            continue;
        }
        let (u2, v2) = (&g[u], &g[v]);
        let depth = [&u.pi, &v.pi, &u2.pi, &v2.pi].iter().map(|x| t.first_level(x)).collect::<Result<Vec<_>, _>>()?.into_iter().max().unwrap_or(0) + 1;
        for i in t.path(&u.pi, depth)? {
            n += 1;
            if i.contains(&u2.pi) && i.contains(&v.pi) {
                r.check(i.contains(&v2.pi), "transfer-upper", || format!("{u} < {v}: {i} holds pi of u, g(u), v but not g(v) = {v2}"));
            }
            if i.contains(&v.pi) && i.contains(&v2.pi) {
                r.check(i.contains(&u2.pi), "transfer-lower", || format!("{u} < {v}: {i} holds pi of u, v, g(v) but not g(u) = {u2}"));
            }
        }
    }
    Ok((r, n))
}

/// For incomparable compatible cross pairs `s, t` of the amalgam with
/// `pi_-(s) < pi_-(t)`, separating interval `I` and a common lower bound strictly
/// inside `I` above its left end: each block point among `s, t` has its owner's
/// `J` strictly inside `I`.
pub fn check_separating_interval(t: &IntervalTree, pa: &Condition, pb: &Condition, z: &Condition) -> Result<(Report, usize), AmalgamError> {
    let mut r = Report::new();
    let mut n = 0;
    let only_a: Vec<&Point> = pa.points().iter().filter(|x| !pb.contains(x)).collect();
    let only_b: Vec<&Point> = pb.points().iter().filter(|x| !pa.contains(x)).collect();
    for a in &only_a {
        for b in &only_b {
            if z.comparable(a, b) {
                continue;
            }
            let (lo, hi) = match a.pi_minus().cmp(&b.pi_minus()) {
                std::cmp::Ordering::Less => (*a, *b),
                std::cmp::Ordering::Greater => (*b, *a),
                std::cmp::Ordering::Equal => continue,
            };
            let lower: Vec<Point> = z.common_lower(lo, hi).into_iter().collect();
            if lower.is_empty() {
                continue;
            }
            let i = separation(t, &lo.pi_minus(), &hi.pi_minus())?.i;
            for w in lower.iter().filter(|w| i.contains(&w.pi) && w.pi > i.lo) {
                for x in [lo, hi] {
                    let Some(owner) = x.owner() else { continue };
                    n += 1;
                    let j = t.j_interval(owner)?;
                    r.check(j.is_subset_of(&i) && j != i, "separating-interval", || {
                        format!("{x} above {w}: J({owner}) = {j} is not strictly inside {i}")
                    });
                }
            }
        }
    }
    Ok((r, n))
}
