//! Finite conditions `<x_p, ⪯_p, i_p>`, their text format, the extension
//! relation, and the full validator for (P1)-(P4).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delta::h_pair;
use crate::forcing::point::{Point, PointError};
use crate::report::Report;
use crate::tree::IntervalTree;
use crate::universe::{SplitResult, UniverseSpec};
use crate::walks::walk;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("condition file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Point(#[from] PointError),
}

fn key(a: &Point, b: &Point) -> (Point, Point) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// A finite condition. `up` maps each point to its strict upper set and is
/// kept transitively closed by the builders here; `inf` defaults to empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Condition {
    points: BTreeSet<Point>,
    up: BTreeMap<Point, BTreeSet<Point>>,
    inf: BTreeMap<(Point, Point), BTreeSet<Point>>,
}

impl Condition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &BTreeSet<Point> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    pub fn lt(&self, a: &Point, b: &Point) -> bool {
        self.up.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn leq(&self, a: &Point, b: &Point) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn comparable(&self, a: &Point, b: &Point) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// All pairs `a < b`.
    pub fn less_iter(&self) -> impl Iterator<Item = (&Point, &Point)> + '_ {
        self.up.iter().flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }

    pub fn less_count(&self) -> usize {
        self.up.values().map(|s| s.len()).sum()
    }

    pub fn inf(&self, a: &Point, b: &Point) -> BTreeSet<Point> {
        self.inf.get(&key(a, b)).cloned().unwrap_or_default()
    }

    /// Stored non-empty infima, keyed by ordered pair.
    pub fn inf_entries(&self) -> &BTreeMap<(Point, Point), BTreeSet<Point>> {
        &self.inf
    }

    pub fn insert_point(&mut self, p: Point) -> bool {
        self.points.insert(p)
    }

    /// Records `a < b` without closing transitively.
    pub fn insert_lt(&mut self, a: Point, b: Point) {
        self.up.entry(a).or_default().insert(b);
    }

    pub fn set_inf(&mut self, a: &Point, b: &Point, v: BTreeSet<Point>) {
        if v.is_empty() {
            self.inf.remove(&key(a, b));
        } else {
            self.inf.insert(key(a, b), v);
        }
    }

    /// Closes the order transitively.
    pub fn close_order(&mut self) {
        loop {
            let mut add: Vec<(Point, Point)> = Vec::new();
            for (a, s) in &self.up {
                for b in s {
                    for d in self.up.get(b).into_iter().flatten() {
                        if !s.contains(d) {
                            add.push((a.clone(), d.clone()));
                        }
                    }
                }
            }
            if add.is_empty() {
                break;
            }
            for (a, d) in add {
                self.insert_lt(a, d);
            }
        }
    }

    /// Strict lower set of `p`.
    pub fn below(&self, p: &Point) -> BTreeSet<Point> {
        self.up.iter().filter(|(_, s)| s.contains(p)).map(|(a, _)| a.clone()).collect()
    }

    /// Strict upper set of `p`.
    pub fn above(&self, p: &Point) -> BTreeSet<Point> {
        self.up.get(p).cloned().unwrap_or_default()
    }

    /// Common lower bounds `u ⪯ a, b`.
    pub fn common_lower(&self, a: &Point, b: &Point) -> BTreeSet<Point> {
        let mut la = self.below(a);
        la.insert(a.clone());
        let mut lb = self.below(b);
        lb.insert(b.clone());
        la.intersection(&lb).cloned().collect()
    }

    /// `self ≤ p`: more points, the same order on `p`'s points, and the same infima there.
    pub fn extension_report(&self, p: &Condition) -> Report {
        let mut r = Report::new();
        for x in &p.points {
            r.check(self.contains(x), "ext-points", || format!("{x} dropped"));
        }
        for a in &p.points {
            for b in &p.points {
                if a != b && self.contains(a) && self.contains(b) {
                    r.check(self.lt(a, b) == p.lt(a, b), "ext-order", || format!("order between {a} and {b} changed"));
                    if a < b {
                        r.check(self.inf(a, b) == p.inf(a, b), "ext-inf", || format!("i{{{a}, {b}}} changed"));
                    }
                }
            }
        }
        r
    }

    pub fn extends(&self, p: &Condition) -> bool {
        self.extension_report(p).is_ok()
    }

    pub fn unit_etas(&self) -> impl Iterator<Item = u32> + '_ {
        self.points.iter().filter_map(|p| match p.eta {
            crate::forcing::point::Eta::Nat(n) => Some(n),
            _ => None,
        })
    }

    /// Text form with `points`, `order` and `inf` sections.
    pub fn to_text(&self) -> String {
        let mut out = String::from("points\n");
        for p in &self.points {
            out.push_str(&format!("  {p}\n"));
        }
        out.push_str("order\n");
        for (a, b) in self.less_iter() {
            out.push_str(&format!("  {a} < {b}\n"));
        }
        out.push_str("inf\n");
        for ((a, b), v) in &self.inf {
            let vs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("  {{{a}, {b}}} = {{{}}}\n", vs.join(", ")));
        }
        out
    }

    /// Parses the text form. The order section is closed transitively.
    pub fn parse(text: &str, s: &SplitResult) -> Result<Condition, ConditionError> {
        let mut c = Condition::new();
        let mut section = "";
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| ConditionError::Parse { line: i + 1, reason };
            if matches!(line, "points" | "order" | "inf") {
                section = if line == "points" { "points" } else if line == "order" { "order" } else { "inf" };
                continue;
            }
            match section {
                "points" => {
                    c.insert_point(Point::parse_with(line, s)?);
                }
                "order" => {
                    let toks = point_tokens(line);
                    let sep_ok = toks.len() == 2 && line[toks[0].1..toks[1].0].trim() == "<";
                    if !sep_ok {
                        return Err(err("expected `<a, m> < <b, n>`".into()));
                    }
                    let a = Point::parse_with(&line[toks[0].0..toks[0].1], s)?;
                    let b = Point::parse_with(&line[toks[1].0..toks[1].1], s)?;
                    c.insert_lt(a, b);
                }
                "inf" => {
                    let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected `{s, t} = {...}`".into()))?;
                    let l: Vec<Point> = point_tokens(lhs)
                        .into_iter()
                        .map(|(a, b)| Point::parse_with(&lhs[a..b], s))
                        .collect::<Result<_, _>>()?;
                    if l.len() != 2 {
                        return Err(err("an infimum is keyed by two points".into()));
                    }
                    let r: BTreeSet<Point> = point_tokens(rhs)
                        .into_iter()
                        .map(|(a, b)| Point::parse_with(&rhs[a..b], s))
                        .collect::<Result<_, _>>()?;
                    c.set_inf(&l[0], &l[1], r);
                }
                _ => return Err(err("content before any section header".into())),
            }
        }
        c.close_order();
        Ok(c)
    }
}

/// Byte ranges of `<...>` tokens whose contents hold no `<`.
fn point_tokens(line: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'<' {
            if let Some(off) = line[i + 1..].find(['<', '>']) {
                let j = i + 1 + off;
                if bytes[j] == b'>' {
                    out.push((i, j + 1));
                    i = j + 1;
                    continue;
                }
            }
        }
        i += 1;
    }
    out
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// JSON shape of a condition, with points in text form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub points: Vec<String>,
    pub order: Vec<(String, String)>,
    pub inf: Vec<(String, String, Vec<String>)>,
}

impl From<&Condition> for ConditionJson {
    fn from(c: &Condition) -> Self {
        ConditionJson {
            points: c.points.iter().map(|p| p.to_string()).collect(),
            order: c.less_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            inf: c
                .inf
                .iter()
                .map(|((a, b), v)| (a.to_string(), b.to_string(), v.iter().map(|x| x.to_string()).collect()))
                .collect(),
        }
    }
}

/// Searches a chain `s ≺ c_1 ⪯ ... ⪯ c_{m-1} ⪯ t` with `pi(c_i) = w_i`.
/// Repeated walk entries may reuse one point.
pub fn walk_realized(c: &Condition, s: &Point, t: &Point, w: &[crate::ordinal::Ordinal]) -> bool {
    if w.len() < 2 {
        return false;
    }
    let inner = &w[1..w.len() - 1];
    if inner.is_empty() {
        return c.lt(s, t);
    }
    let mut reach: Vec<&Point> = c.points.iter().filter(|p| p.pi == inner[0] && c.lt(s, p)).collect();
    for v in &inner[1..] {
        reach = c.points.iter().filter(|p| &p.pi == v && reach.iter().any(|q| c.leq(q, p))).collect();
        if reach.is_empty() {
            return false;
        }
    }
    reach.iter().any(|q| c.leq(q, t))
}

/// Checks every clause of (P1)-(P4) and that `⪯_p` is a partial order.
pub fn validate(u: &UniverseSpec, t: &IntervalTree, s: &SplitResult, p: &Condition) -> Report {
    let mut r = Report::new();
    for x in &p.points {
        if let Err(e) = x.check_in_y(u, s) {
            r.push("P1", e.to_string());
        }
    }
    for (a, b) in p.less_iter() {
        r.check(p.contains(a) && p.contains(b), "order-domain", || format!("{a} < {b} mentions a missing point"));
        r.check(a != b, "order-irreflexive", || format!("{a} < {a}"));
        r.check(!p.lt(b, a), "order-antisymmetric", || format!("{a} < {b} and {b} < {a}"));
        for c in p.up.get(b).into_iter().flatten() {
            r.check(p.lt(a, c), "order-transitive", || format!("{a} < {b} < {c} but not {a} < {c}"));
        }
    }
    for ((a, b), v) in &p.inf {
        r.check(p.contains(a) && p.contains(b) && a != b, "inf-domain", || format!("i{{{a}, {b}}} keyed outside x_p"));
        for x in v {
            r.check(p.contains(x), "inf-domain", || format!("i{{{a}, {b}}} contains missing {x}"));
        }
    }
    if !r.is_ok() {
        return r;
    }

    for (a, b) in p.less_iter() {
        r.check(a.pi < b.pi, "P2a", || format!("{a} < {b} without pi increasing"));
        if a.in_u() {
            r.check(a.block_id() == b.block_id(), "P2b", || format!("{a} < {b} leaves block {}", a.block_id()));
        }
        if a.is_unit() && b.in_u2() {
            let ok = p
                .points
                .iter()
                .any(|m| m.in_u1() && m.block_id() == b.block_id() && p.lt(a, m) && p.lt(m, b));
            r.check(ok, "P2c", || format!("{a} < {b} passes through no point of block {}", b.block_id()));
        }
    }
    let blocks: BTreeSet<_> = p.points.iter().filter(|x| x.in_u()).map(|x| x.block_id()).collect();
    for bid in blocks {
        let crate::forcing::point::BlockId::Pair { alpha, zeta } = &bid else { continue };
        let top = Point::top(s, alpha, *zeta);
        if !p.contains(&top) {
            r.push("P2d", format!("block {bid} met but its top {top} is missing"));
            continue;
        }
        for x in p.points.iter().filter(|x| x.block_id() == bid) {
            r.check(p.leq(x, &top), "P2d", || format!("{x} is not below its top {top}"));
        }
    }

    let pts: Vec<&Point> = p.points.iter().collect();
    for (k, a) in pts.iter().enumerate() {
        for b in &pts[k + 1..] {
            let (a, b) = (*a, *b);
            let i = p.inf(a, b);
            if p.lt(a, b) || p.lt(b, a) {
                let lo = if p.lt(a, b) { a } else { b };
                r.check(i.len() == 1 && i.contains(lo), "P3a", || format!("i{{{a}, {b}}} is not {{{lo}}}"));
            }
            if a.is_unit() && b.is_unit() && a.pi == b.pi {
                r.check(i.is_empty(), "P3b", || format!("i{{{a}, {b}}} should be empty"));
            }
            if a.in_u1() && b.in_u1() && a.block_id() == b.block_id() {
                r.check(i.is_empty(), "P3c", || format!("i{{{a}, {b}}} should be empty"));
            }
            let lower = p.common_lower(a, b);
            if !p.comparable(a, b) && !lower.is_empty() {
                match h_pair(t, a, b) {
                    Ok(h) => {
                        for v in &i {
                            r.check(h.contains(&v.pi), "P3d", || format!("pi({v}) not in h{{{a}, {b}}}"));
                        }
                    }
                    Err(e) => r.push("P3d", format!("h{{{a}, {b}}}: {e}")),
                }
            }
            for v in &i {
                r.check(lower.contains(v), "P3e", || format!("{v} in i{{{a}, {b}}} is not below both"));
            }
            for w in &lower {
                r.check(i.iter().any(|v| p.leq(w, v)), "P3f", || format!("{w} below {a}, {b} is under no element of i"));
            }
        }
    }

    for (a, b) in p.less_iter() {
        if !a.is_unit() {
            continue;
        }
        match walk(t, &a.pi, &b.pi) {
            Ok(w) => r.check(walk_realized(p, a, b, &w.seq), "P4", || format!("{a} < {b}: walk {w} not realized")),
            Err(e) => r.push("P4", format!("{a} < {b}: {e}")),
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use crate::universe::split_f;

    fn setup() -> (UniverseSpec, IntervalTree, SplitResult) {
        let u = UniverseSpec::u_star();
        let t = IntervalTree::new(u.clone());
        let s = split_f(&u, &t).unwrap();
        (u, t, s)
    }

    #[test]
    fn empty_and_singleton_are_valid() {
        let (u, t, s) = setup();
        let mut c = Condition::new();
        assert!(validate(&u, &t, &s, &c).is_ok());
        c.insert_point(Point::unit(ord("w+3"), 0));
        assert!(validate(&u, &t, &s, &c).is_ok());
    }

    #[test]
    fn missing_walk_point_is_rejected() {
        let (u, t, s) = setup();
        let text = "points\n  <0, 0>\n  <w+1, 0>\norder\n  <0, 0> < <w+1, 0>\ninf\n  {<0, 0>, <w+1, 0>} = {<0, 0>}\n";
        let c = Condition::parse(text, &s).unwrap();
        let r = validate(&u, &t, &s, &c);
        assert!(r.has_rule("P4") && r.violations.len() == 1, "{r}");
        let mut fixed = c.clone();
        let mid = Point::unit(ord("w"), 0);
        fixed.insert_point(mid.clone());
        fixed.insert_lt(Point::unit(ord("0"), 0), mid.clone());
        fixed.insert_lt(mid.clone(), Point::unit(ord("w+1"), 0));
        fixed.set_inf(&Point::unit(ord("0"), 0), &mid, [Point::unit(ord("0"), 0)].into());
        fixed.set_inf(&mid, &Point::unit(ord("w+1"), 0), [mid.clone()].into());
        assert!(validate(&u, &t, &s, &fixed).is_ok(), "{}", validate(&u, &t, &s, &fixed));
    }

    #[test]
    fn text_round_trip_and_block_clauses() {
        let (u, t, s) = setup();
        let y = Point::block(&s, &ord("w^2"), 1, 0);
        let top = Point::top(&s, &ord("w^2"), 1);
        let mut c = Condition::new();
        c.insert_point(y.clone());
        let r = validate(&u, &t, &s, &c);
        assert!(r.has_rule("P2d"), "{r}");
        c.insert_point(top.clone());
        c.insert_lt(y.clone(), top.clone());
        c.set_inf(&y, &top, [y.clone()].into());
        assert!(validate(&u, &t, &s, &c).is_ok());
        let back = Condition::parse(&c.to_text(), &s).unwrap();
        assert_eq!(back, c);
        // a unit point straight below the top skips the block
        let z = Point::unit(ord("5"), 0);
        c.insert_point(z.clone());
        c.insert_lt(z.clone(), top.clone());
        c.set_inf(&z, &top, [z.clone()].into());
        assert!(validate(&u, &t, &s, &c).has_rule("P2c"));
    }

    #[test]
    fn extension_relation() {
        let a = Point::unit(ord("1"), 0);
        let b = Point::unit(ord("2"), 0);
        let mut p = Condition::new();
        p.insert_point(a.clone());
        let mut q = p.clone();
        q.insert_point(b.clone());
        assert!(q.extends(&p) && !p.extends(&q));
        let mut q2 = q.clone();
        q2.insert_lt(a.clone(), b.clone());
        assert!(q2.extends(&p));
        let mut p2 = q.clone();
        p2.set_inf(&a, &b, [a.clone()].into());
        assert!(!q.extends(&p2));
    }
}
