//! Seeded random points, requests and conditions.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::forcing::amalgam::{thinning_check, PointMap};
use crate::forcing::condition::Condition;
use crate::forcing::density::{add_point, extend_below, DensityError};
use crate::forcing::point::{Eta, Point};
use crate::ordinal::Ordinal;
use crate::sample::ordinal_below;
use crate::tree::{ESeq, Interval, IntervalTree, TreeError};
use crate::universe::{SplitResult, UniverseSpec};

/// One density step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Request {
    AddPoint(Point),
    ExtendBelow { tgt: Point, alpha: Ordinal, j: u32 },
}

impl Request {
    pub fn apply(&self, u: &UniverseSpec, t: &IntervalTree, s: &SplitResult, p: &Condition) -> Result<Condition, DensityError> {
        match self {
            Request::AddPoint(y) => add_point(u, s, p, y),
            Request::ExtendBelow { tgt, alpha, j } => extend_below(u, t, s, p, tgt, alpha, *j).map(|(q, _)| q),
        }
    }
}

/// A random point of `Y`: mostly unit points, otherwise block points and tops.
pub fn point<R: Rng + ?Sized>(rng: &mut R, u: &UniverseSpec, s: &SplitResult) -> Point {
    let blocks = !s.l_tilde.is_empty() && u.lambda > 1;
    if blocks && rng.gen_bool(0.3) {
        let alpha = s.l_tilde.iter().choose(rng).expect("non-empty").clone();
        let zeta = rng.gen_range(1..u.lambda);
        if rng.gen_bool(0.5) {
            return Point::top(s, &alpha, zeta);
        }
        return Point::block(s, &alpha, zeta, rng.gen_range(0..4));
    }
    Point::unit(ordinal_below(rng, &u.delta, 3), rng.gen_range(0..4))
}

/// A random request against `p`: an extension below a present point when there
/// is one, otherwise a point addition.
pub fn request<R: Rng + ?Sized>(rng: &mut R, u: &UniverseSpec, s: &SplitResult, p: &Condition) -> Request {
    let tgt = p.points().iter().filter(|x| !x.pi.is_zero()).choose(rng).cloned();
    match tgt {
        Some(tgt) if rng.gen_bool(0.6) => {
            let alpha = ordinal_below(rng, &tgt.pi, 3);
            Request::ExtendBelow { tgt, alpha, j: rng.gen_range(0..3) }
        }
        _ => Request::AddPoint(point(rng, u, s)),
    }
}

/// Applies `steps` random requests to the empty condition, skipping refused ones.
pub fn condition<R: Rng + ?Sized>(rng: &mut R, u: &UniverseSpec, t: &IntervalTree, s: &SplitResult, steps: usize) -> Condition {
    let mut p = Condition::new();
    for _ in 0..steps {
        let r = request(rng, u, s, &p);
        if let Ok(q) = r.apply(u, t, s, &p) {
            p = q;
        }
    }
    p
}

/// How the second condition of a generated pair is obtained from the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    Identity,
    /// Swaps block index `from` for `to` in the blocks owned by `alpha`.
    Relabel { alpha: Ordinal, from: u32, to: u32 },
    /// Translates the closed range `[from.lo, from.hi]` onto `[to_lo, ...]`.
    Shift { from: Interval, to_lo: Ordinal },
}

impl Transform {
    pub fn ordinal(&self, x: &Ordinal) -> Ordinal {
        match self {
            Transform::Shift { from, to_lo } if &from.lo <= x && x <= &from.hi => {
                to_lo.add(&Ordinal::ot_diff(&from.lo, x).expect("inside the range"))
            }
            _ => x.clone(),
        }
    }

    pub fn point(&self, s: &SplitResult, p: &Point) -> Point {
        match (self, &p.eta) {
            (Transform::Relabel { alpha, from, to }, Eta::Block { alpha: a, zeta, n }) if a == alpha && zeta == from => Point::block(s, a, *to, *n),
            (Transform::Relabel { alpha, from, to }, Eta::Top { alpha: a, zeta }) if a == alpha && zeta == from => Point::top(s, a, *to),
            (Transform::Shift { .. }, Eta::Nat(n)) => Point::unit(self.ordinal(&p.pi), *n),
            _ => p.clone(),
        }
    }

    pub fn request(&self, s: &SplitResult, r: &Request) -> Request {
        match r {
            Request::AddPoint(y) => Request::AddPoint(self.point(s, y)),
            Request::ExtendBelow { tgt, alpha, j } => Request::ExtendBelow { tgt: self.point(s, tgt), alpha: self.ordinal(alpha), j: *j },
        }
    }
}

/// A pair of valid conditions with a map passing the thinning check.
#[derive(Debug, Clone)]
pub struct ProfilePair {
    pub a: Condition,
    pub b: Condition,
    pub g: PointMap,
    pub transform: Transform,
}

/// Non-adjacent siblings of equal order type beyond the forced part of an
/// omega-type `E`, whose sampled points keep their first level under the shift.
pub fn sibling_pairs(t: &IntervalTree, depth: usize, width: usize) -> Result<Vec<(Interval, Interval)>, TreeError> {
    let mut out = Vec::new();
    for level in t.materialize(depth, width)? {
        for p in level {
            let ESeq::Omega { forced, .. } = t.e_seq(&p)? else { continue };
            let kids = t.children(&p, width)?;
            for i in forced.len()..kids.len() {
                for j in i + 2..kids.len() {
                    let (r1, r2) = (&kids[i], &kids[j]);
                    let ot = Ordinal::ot_diff(&r1.lo, &r1.hi).expect("interval");
                    if ot != Ordinal::ot_diff(&r2.lo, &r2.hi).expect("interval") {
                        continue;
                    }
                    let tr = Transform::Shift { from: r1.clone(), to_lo: r2.lo.clone() };
                    let mut probe = vec![r1.lo.clone(), r1.lo.succ()];
                    if !ot.is_finite() {
                        probe.push(r1.lo.add(&Ordinal::omega()));
                        probe.push(r1.lo.add(&Ordinal::omega()).succ());
                    }
                    let same = probe.iter().filter(|x| r1.contains(x)).all(|x| {
                        matches!((t.first_level(x), t.first_level(&tr.ordinal(x))), (Ok(a), Ok(b)) if a == b)
                    });
                    if same {
                        out.push((r1.clone(), r2.clone()));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn ordinal_in<R: Rng + ?Sized>(rng: &mut R, lo: &Ordinal, hi: &Ordinal) -> Ordinal {
    let span = Ordinal::ot_diff(lo, hi).expect("lo <= hi");
    lo.add(&ordinal_below(rng, &span, 3))
}

fn private_request<R: Rng + ?Sized>(rng: &mut R, s: &SplitResult, tr: &Transform, kernel: &Condition, private: &[Point]) -> Option<Request> {
    let roll: f64 = rng.gen();
    let j = rng.gen_range(0..3);
    let mine = private.iter().filter(|x| !x.pi.is_zero()).choose(rng).cloned();
    match tr {
        Transform::Identity => None,
        Transform::Relabel { alpha, from, .. } => {
            if roll < 0.3 || mine.is_none() {
                return Some(Request::AddPoint(Point::block(s, alpha, *from, rng.gen_range(0..3))));
            }
            let tgt = if roll < 0.9 { mine? } else { kernel.points().iter().filter(|x| !x.pi.is_zero()).choose(rng)?.clone() };
            let alpha = ordinal_below(rng, &tgt.pi, 3);
            Some(Request::ExtendBelow { tgt, alpha, j })
        }
        Transform::Shift { from, .. } => {
            if roll < 0.35 || mine.is_none() {
                let pi = ordinal_in(rng, &from.lo, &from.hi);
                return Some(Request::AddPoint(Point::unit(pi, rng.gen_range(0..3))));
            }
            let tgt = mine?;
            if roll < 0.8 && tgt.pi > from.lo {
                return Some(Request::ExtendBelow { alpha: ordinal_in(rng, &from.lo, &tgt.pi), tgt, j });
            }
            if roll < 0.9 {
                return Some(Request::ExtendBelow { alpha: ordinal_below(rng, &tgt.pi, 3), tgt, j });
            }
            let up = kernel.points().iter().filter(|x| x.pi > from.hi).choose(rng)?.clone();
            Some(Request::ExtendBelow { tgt: up, alpha: ordinal_in(rng, &from.lo, &from.hi), j })
        }
    }
}

/// Draws a kernel condition, a transform, and up to four private requests
/// replayed on both sides. Returns `None` when a replay is refused or the
/// pair misses the profile.
pub fn profile_pair<R: Rng + ?Sized>(
    rng: &mut R,
    u: &UniverseSpec,
    t: &IntervalTree,
    s: &SplitResult,
    siblings: &[(Interval, Interval)],
) -> Option<ProfilePair> {
    let steps = rng.gen_range(0..4);
    let kernel = condition(rng, u, t, s, steps);
    let roll: f64 = rng.gen();
    let tr = if roll < 0.1 {
        Transform::Identity
    } else if roll < 0.55 && u.lambda >= 3 && !s.l_tilde.is_empty() {
        let alpha = s.l_tilde.iter().choose(rng)?.clone();
        let mut z: Vec<u32> = (1..u.lambda).collect();
        z.shuffle(rng);
        Transform::Relabel { alpha, from: z[0], to: z[1] }
    } else {
        let (r1, r2) = siblings.choose(rng)?;
        Transform::Shift { from: r1.clone(), to_lo: r2.lo.clone() }
    };
    let (mut a, mut b) = (kernel.clone(), kernel.clone());
    let mut private: Vec<Point> = Vec::new();
    let ops = rng.gen_range(1..=4);
    for _ in 0..ops {
        let Some(req) = private_request(rng, s, &tr, &kernel, &private) else { break };
        let Ok(next) = req.apply(u, t, s, &a) else { continue };
        private.extend(next.points().iter().filter(|x| !a.contains(x)).cloned());
        a = next;
        b = tr.request(s, &req).apply(u, t, s, &b).ok()?;
    }
    let g: PointMap = a.points().iter().map(|x| (x.clone(), tr.point(s, x))).collect();
    thinning_check(t, s, &a, &b, &g).ok()?;
    Some(ProfilePair { a, b, g, transform: tr })
}
