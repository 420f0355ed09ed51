//! Towers with a single top point, and the replacement of the big blocks of a
//! condition by towers.
//!
//! A tower of height `h` materializes a finite set of levels below `h` as a
//! chain of supply-`w` classes with the top above them. Since each copy carries
//! private replicas of everything below it, this is the `w`-branching tree in
//! which every point at a sampled level has `w` immediate predecessors at the
//! next lower sampled level. Incomparable points have disjoint lower sets, so
//! every infimum of an incomparable pair is empty.

use std::collections::{BTreeMap, BTreeSet};

use super::{LcsPoset, PPoint, PosetError, Supply};
use crate::forcing::condition::{validate, Condition};
use crate::forcing::point::{Eta, Point};
use crate::ordinal::Ordinal;
use crate::tree::IntervalTree;
use crate::universe::{SplitResult, UniverseSpec};

pub const TOP_TAG: &str = "top";

/// The default level sample below `h`: three lowest and three highest
/// canonical levels.
pub fn tower_levels(h: &Ordinal) -> BTreeSet<Ordinal> {
    let mut out = BTreeSet::new();
    if let Some(n) = h.as_nat() {
        let lo = (0..n.min(3)).map(Ordinal::nat);
        let hi = (n.saturating_sub(3)..n).map(Ordinal::nat);
        return lo.chain(hi).collect();
    }
    out.extend((0..3).map(Ordinal::nat));
    let lim = h.limit_part();
    let f = |k| lim.fundamental(k).expect("limit");
    out.extend([f(1), f(2), f(2).succ()]);
    let fin = h.finite_part();
    out.extend((fin.saturating_sub(3)..fin).map(|k| lim.plus_nat(k)));
    out.retain(|x| x < h);
    if out.len() > 6 {
        let v: Vec<Ordinal> = out.into_iter().collect();
        out = v[..3].iter().chain(&v[v.len() - 3..]).cloned().collect();
    }
    out
}

fn check_height(h: &Ordinal) -> Result<(), PosetError> {
    let ok = !h.is_zero() && h.terms()[0].exp.is_finite();
    if ok {
        Ok(())
    } else {
        Err(PosetError::HeightOutOfRange(h.clone()))
    }
}

/// A tower of height `h`: `w` points at every sampled level below `h`, the
/// named `base` points at level 0, and one top point at level `h`.
pub fn make_tower(h: &Ordinal, base: &[String]) -> Result<LcsPoset, PosetError> {
    make_tower_at(h, base, &BTreeSet::new())
}

/// [`make_tower`] with extra levels below `h` added to the sample.
pub fn make_tower_at(h: &Ordinal, base: &[String], extra: &BTreeSet<Ordinal>) -> Result<LcsPoset, PosetError> {
    check_height(h)?;
    let mut levels = tower_levels(h);
    levels.extend(extra.iter().filter(|x| *x < h).cloned());
    let mut p = LcsPoset::new();
    let top = PPoint::new(h.clone(), TOP_TAG);
    p.insert(top.clone());
    let mut chain: Vec<PPoint> = Vec::new();
    for (i, lv) in levels.iter().enumerate() {
        let x = PPoint::new(lv.clone(), format!("l{i}"));
        p.insert(x.clone());
        p.set_supply(&x, Supply::Omega);
        p.insert_lt(x.clone(), top.clone());
        for y in &chain {
            p.insert_lt(y.clone(), x.clone());
        }
        chain.push(x);
    }
    for b in base {
        let x = PPoint::new(Ordinal::zero(), b.clone());
        p.insert(x.clone());
        p.insert_lt(x, top.clone());
    }
    p.close_order();
    p.fill_comparable_infima();
    Ok(p)
}

fn compact(x: &Ordinal) -> String {
    x.to_string().replace(' ', "")
}

/// Poset point of a condition point; block tops map to `None`.
pub fn ppoint_of(p: &Point) -> Option<PPoint> {
    match &p.eta {
        Eta::Nat(n) => Some(PPoint::new(p.pi.clone(), format!("u{n}"))),
        Eta::Block { alpha, zeta, n } => Some(PPoint::new(p.pi.clone(), format!("c{}:{zeta}:{n}", compact(alpha)))),
        Eta::Top { .. } => None,
    }
}

fn top_ppoint_of(p: &Point) -> PPoint {
    match &p.eta {
        Eta::Top { alpha, zeta } => PPoint::new(p.pi.clone(), format!("old{}:{zeta}", compact(alpha))),
        _ => ppoint_of(p).expect("not a top"),
    }
}

/// The condition as a poset fragment: every point keeps its level as floor.
pub fn poset_of_condition(c: &Condition) -> LcsPoset {
    let mut q = LcsPoset::new();
    for x in c.points() {
        let y = top_ppoint_of(x);
        q.insert(y.clone());
        q.set_floor(&y, y.level.clone());
    }
    for (a, b) in c.less_iter() {
        q.insert_lt(top_ppoint_of(a), top_ppoint_of(b));
    }
    for ((a, b), v) in c.inf_entries() {
        q.set_inf(&top_ppoint_of(a), &top_ppoint_of(b), v.iter().map(top_ppoint_of).collect());
    }
    q
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Frag(Point),
    /// Tower point of a block; `lower` marks the unmaterialized bottom class.
    Tower { block: (Ordinal, u32), lower: bool },
}

/// Replaces every big block met by `c` with a tower from `gamma_alpha` up to
/// `alpha`, keeping the block points met by `c` as named base points.
pub fn transform_blocks(u: &UniverseSpec, t: &IntervalTree, s: &SplitResult, c: &Condition) -> Result<LcsPoset, PosetError> {
    let r = validate(u, t, s, c);
    if let Some(v) = r.violations.first() {
        return Err(PosetError::MalformedBlockStructure(format!("input is not a valid condition: {}: {}", v.rule, v.witness)));
    }
    let mut tops: BTreeMap<(Ordinal, u32), Point> = BTreeMap::new();
    let mut base: BTreeMap<(Ordinal, u32), Vec<Point>> = BTreeMap::new();
    for x in c.points() {
        match &x.eta {
            Eta::Top { alpha, zeta } => {
                tops.insert((alpha.clone(), *zeta), x.clone());
            }
            Eta::Block { alpha, zeta, .. } => base.entry((alpha.clone(), *zeta)).or_default().push(x.clone()),
            Eta::Nat(_) => {}
        }
    }
    if let Some(b) = base.keys().find(|b| !tops.contains_key(*b)) {
        return Err(PosetError::MalformedBlockStructure(format!("block <{}, {}> has points but no top", b.0, b.1)));
    }
    let frag: Vec<&Point> = c.points().iter().filter(|x| !matches!(x.eta, Eta::Top { .. })).collect();
    let mut q = LcsPoset::new();
    let mut kind: BTreeMap<PPoint, Kind> = BTreeMap::new();
    for x in &frag {
        let y = ppoint_of(x).expect("not a top");
        q.insert(y.clone());
        q.set_floor(&y, y.level.clone());
        kind.insert(y, Kind::Frag((*x).clone()));
    }
    for (a, b) in c.less_iter() {
        if let (Some(a), Some(b)) = (ppoint_of(a), ppoint_of(b)) {
            q.insert_lt(a, b);
        }
    }
    let frag_levels: BTreeSet<Ordinal> = frag.iter().map(|x| x.pi.clone()).collect();
    for blk in tops.keys() {
        let (alpha, zeta) = blk;
        let gamma = s.gamma(alpha).ok_or_else(|| PosetError::MalformedBlockStructure(format!("{alpha} has no gamma")))?;
        let h = Ordinal::ot_diff(gamma, alpha).map_err(|e| PosetError::MalformedBlockStructure(e.to_string()))?;
        let members = base.get(blk).cloned().unwrap_or_default();
        let tags: Vec<String> = members.iter().map(|x| ppoint_of(x).expect("block point").tag).collect();
        let extra: BTreeSet<Ordinal> = frag_levels
            .iter()
            .filter(|l| *l >= gamma && *l < alpha)
            .map(|l| Ordinal::ot_diff(gamma, l).expect("inside"))
            .collect();
        let tower = make_tower_at(&h, &tags, &extra)?;
        let prefix = format!("{}:{zeta}", compact(alpha));
        let place = |x: &PPoint| -> PPoint {
            let level = gamma.add(&x.level);
            if tags.contains(&x.tag) {
                PPoint::new(level, x.tag.clone())
            } else if x.tag == TOP_TAG {
                PPoint::new(level, format!("t{prefix}"))
            } else {
                PPoint::new(level, format!("T{prefix}.{}", x.tag))
            }
        };
        let top = place(&PPoint::new(h.clone(), TOP_TAG));
        if &top.level != alpha {
            return Err(PosetError::MalformedBlockStructure(format!("tower of <{alpha}, {zeta}> ends at {}", top.level)));
        }
        for x in tower.points() {
            let y = place(x);
            if !tags.contains(&x.tag) {
                q.insert(y.clone());
                q.set_supply(&y, tower.supply(x));
                q.set_floor(&y, gamma.clone());
                kind.insert(y, Kind::Tower { block: blk.clone(), lower: x.level.is_zero() });
            }
        }
        for (a, b) in tower.less_iter() {
            q.insert_lt(place(a), place(b));
        }
        // unit points below a named base point sit below everything above it
        for m in &members {
            let mp = ppoint_of(m).expect("block point");
            let ups: Vec<PPoint> = tower.above(&PPoint::new(Ordinal::zero(), mp.tag.clone())).iter().map(place).collect();
            for sp in c.below(m) {
                if let Some(sp) = ppoint_of(&sp) {
                    for x in &ups {
                        q.insert_lt(sp.clone(), x.clone());
                    }
                }
            }
        }
    }
    q.close_order();
    let pts: Vec<PPoint> = q.points().iter().cloned().collect();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let v = if q.lt(a, b) {
                [a.clone()].into()
            } else if q.lt(b, a) {
                [b.clone()].into()
            } else {
                incomparable_inf(c, &q, &tops, &kind, a, b)
            };
            q.set_inf(a, b, v);
        }
    }
    Ok(q)
}

fn incomparable_inf(
    c: &Condition,
    q: &LcsPoset,
    tops: &BTreeMap<(Ordinal, u32), Point>,
    kind: &BTreeMap<PPoint, Kind>,
    a: &PPoint,
    b: &PPoint,
) -> BTreeSet<PPoint> {
    let lift = |v: BTreeSet<Point>| -> BTreeSet<PPoint> { v.iter().filter_map(ppoint_of).collect() };
    let under = |v: BTreeSet<PPoint>, xs: &[&PPoint]| -> BTreeSet<PPoint> { v.into_iter().filter(|w| xs.iter().all(|x| q.lt(w, x))).collect() };
    match (&kind[a], &kind[b]) {
        (Kind::Frag(x), Kind::Frag(y)) => lift(c.inf(x, y)),
        (Kind::Tower { block: p, lower: la }, Kind::Tower { block: r, lower: lb }) => {
            if p == r || *la || *lb {
                BTreeSet::new()
            } else {
                under(lift(c.inf(&tops[p], &tops[r])), &[a, b])
            }
        }
        (Kind::Frag(x), Kind::Tower { block, lower }) | (Kind::Tower { block, lower }, Kind::Frag(x)) => {
            let tw = if matches!(kind[a], Kind::Tower { .. }) { a } else { b };
            let same_block = matches!(&x.eta, Eta::Block { alpha, zeta, .. } if (alpha.clone(), *zeta) == *block);
            let top = &tops[block];
            if *lower || same_block || c.lt(x, top) {
                BTreeSet::new()
            } else {
                under(lift(c.inf(x, top)), &[tw])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::density::{add_point, extend_below};
    use crate::ordinal::ord;
    use crate::poset::cb::{symbolic_cb, ReplicatedPoset};
    use crate::poset::{validate_poset, Card};
    use crate::universe::split_f;

    #[test]
    fn height_one_tower() {
        let p = make_tower(&ord("1"), &[]).unwrap();
        assert_eq!(p.len(), 2);
        assert!(validate_poset(&p).is_ok());
        let top = PPoint::new(ord("1"), TOP_TAG);
        assert_eq!(p.below(&top).len(), 1);
        assert_eq!(p.level_cards()[&ord("0")], Card::Omega);
        assert_eq!(p.level_cards()[&ord("1")], Card::Finite(1));
    }

    #[test]
    fn towers_validate_and_rank_by_level() {
        for h in ["2", "5", "9", "w", "w+3", "w^2", "w^2*2+w", "w^3+1"] {
            let h = ord(h);
            let p = make_tower(&h, &["b0".into(), "b1".into()]).unwrap();
            assert!(validate_poset(&p).is_ok(), "{h}: {}", validate_poset(&p));
            let cards = p.level_cards();
            assert_eq!(cards.iter().next_back(), Some((&h, &Card::Finite(1))));
            assert!(cards.iter().filter(|(l, _)| **l < h).all(|(_, c)| *c == Card::Omega));
            let r = ReplicatedPoset::from_poset(&p);
            let cb = symbolic_cb(&r);
            assert_eq!(cb.height, p.levels().len());
            assert_eq!(cb.cardinal_sequence.last(), Some(&Card::Finite(1)));
        }
        assert!(matches!(make_tower(&ord("0"), &[]), Err(PosetError::HeightOutOfRange(_))));
        assert!(matches!(make_tower(&ord("w^w"), &[]), Err(PosetError::HeightOutOfRange(_))));
    }

    fn setup() -> (UniverseSpec, IntervalTree, SplitResult) {
        let u = UniverseSpec::u_star();
        let t = IntervalTree::new(u.clone());
        let s = split_f(&u, &t).unwrap();
        (u, t, s)
    }

    #[test]
    fn no_blocks_leaves_the_poset_alone() {
        let (u, t, s) = setup();
        let c = add_point(&u, &s, &Condition::new(), &Point::unit(ord("w+1"), 0)).unwrap();
        let (c, _) = extend_below(&u, &t, &s, &c, &Point::unit(ord("w+1"), 0), &ord("0"), 0).unwrap();
        let q = transform_blocks(&u, &t, &s, &c).unwrap();
        assert_eq!(q, poset_of_condition(&c));
        assert!(validate_poset(&q).is_ok());
    }

    #[test]
    fn u_star_block_becomes_a_tower() {
        let (u, t, s) = setup();
        let a = ord("w^2");
        let y = Point::block(&s, &a, 1, 0);
        let c = add_point(&u, &s, &Condition::new(), &y).unwrap();
        let (c, _) = extend_below(&u, &t, &s, &c, &y, &ord("0"), 0).unwrap();
        let q = transform_blocks(&u, &t, &s, &c).unwrap();
        assert!(validate_poset(&q).is_ok(), "{}", validate_poset(&q));
        let top = PPoint::new(a.clone(), "tw^2:1");
        assert!(q.contains(&top));
        let tower: Vec<&PPoint> = q.points().iter().filter(|x| x.tag.starts_with("Tw^2:1") || **x == top).collect();
        assert!(tower.iter().all(|x| x.level >= ord("w") && x.level <= a));
        // the named block point and the unit point under it are below the new top
        let yp = ppoint_of(&y).unwrap();
        assert!(q.lt(&yp, &top));
        assert!(q.below(&yp).iter().all(|v| q.lt(v, &top)));
    }

    #[test]
    fn empty_branch_between_a_point_under_the_old_top_and_the_tower() {
        let (u, t, s) = setup();
        let a = ord("w^2");
        let (y1, y2) = (Point::block(&s, &a, 1, 0), Point::block(&s, &a, 2, 0));
        let mut c = add_point(&u, &s, &Condition::new(), &y1).unwrap();
        c = add_point(&u, &s, &c, &y2).unwrap();
        let (c, _) = extend_below(&u, &t, &s, &c, &y1, &ord("0"), 0).unwrap();
        let q = transform_blocks(&u, &t, &s, &c).unwrap();
        assert!(validate_poset(&q).is_ok(), "{}", validate_poset(&q));
        // a unit point below the old top of block 1 against the tower of block 1
        let old_top = Point::top(&s, &a, 1);
        let below_top: Vec<Point> = c.below(&old_top).into_iter().filter(|x| x.is_unit()).collect();
        assert!(!below_top.is_empty());
        let mid = q.points().iter().find(|x| x.tag.starts_with("Tw^2:1.") && x.level > ord("w")).unwrap().clone();
        for x in below_top {
            let xp = ppoint_of(&x).unwrap();
            assert!(!q.comparable(&xp, &mid));
            assert!(q.inf(&xp, &mid).is_empty());
            assert!(q.points().iter().all(|v| !(q.lt(v, &xp) && q.lt(v, &mid))));
        }
    }
}
