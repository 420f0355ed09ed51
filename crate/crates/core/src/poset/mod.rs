//! Leveled posets with infimum functions, their scattered spaces and
//! Cantor–Bendixson analysis.
//!
//! A point may carry a supply. A point with supply `n` or `w` stands for that
//! many pairwise incomparable copies sharing its upper set, each with a private
//! replica of everything below it. For this to make sense the strict lower set
//! of a replicated point may only reach the rest of the poset through the point
//! itself. A point may also carry a floor: the infinite-predecessor clause is
//! asserted for it only at levels at or above the floor.

pub mod cb;
pub mod tower;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("{excl} is not strictly below {x}")]
    ExclNotBelow { x: String, excl: String },
    #[error("i{{{s}, {t}}} contains {v}, which is outside the subset")]
    NotInfimumClosed { s: String, t: String, v: String },
    #[error("tower height {0} is outside the supported range [1, w^w)")]
    HeightOutOfRange(Ordinal),
    #[error("malformed block structure: {0}")]
    MalformedBlockStructure(String),
}

/// A point `level/tag`. Tags contain neither whitespace nor `/`, `,`, `{`, `}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PPoint {
    pub level: Ordinal,
    pub tag: String,
}

impl PPoint {
    pub fn new(level: Ordinal, tag: impl Into<String>) -> Self {
        PPoint { level, tag: tag.into() }
    }
}

impl fmt::Display for PPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.level, self.tag)
    }
}

impl std::str::FromStr for PPoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lv, tag) = s.trim().rsplit_once('/').ok_or_else(|| format!("`{s}` is not level/tag"))?;
        let tag = tag.trim();
        if tag.is_empty() || tag.contains(|c: char| c.is_whitespace() || ",{}".contains(c)) {
            return Err(format!("bad tag `{tag}`"));
        }
        let level: Ordinal = lv.trim().parse().map_err(|e| format!("{e}"))?;
        Ok(PPoint::new(level, tag))
    }
}

/// How many copies a point stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Supply {
    Finite(u32),
    Omega,
}

impl Supply {
    pub fn is_omega(self) -> bool {
        self == Supply::Omega
    }

    pub fn copies(self, k: u32) -> u32 {
        match self {
            Supply::Finite(n) => n,
            Supply::Omega => k,
        }
    }
}

impl fmt::Display for Supply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Supply::Finite(n) => write!(f, "{n}"),
            Supply::Omega => write!(f, "w"),
        }
    }
}

impl std::str::FromStr for Supply {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "w" | "ω" => Ok(Supply::Omega),
            n => n.parse().map(Supply::Finite).map_err(|_| format!("bad supply `{n}`")),
        }
    }
}

/// A cardinal as seen at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Card {
    Finite(u64),
    Omega,
}

impl Card {
    fn add(self, other: Card) -> Card {
        match (self, other) {
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a + b),
            _ => Card::Omega,
        }
    }

    fn mul(self, other: Card) -> Card {
        match (self, other) {
            (Card::Finite(0), _) | (_, Card::Finite(0)) => Card::Finite(0),
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a * b),
            _ => Card::Omega,
        }
    }
}

impl From<Supply> for Card {
    fn from(s: Supply) -> Card {
        match s {
            Supply::Finite(n) => Card::Finite(n as u64),
            Supply::Omega => Card::Omega,
        }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Finite(n) => write!(f, "{n}"),
            Card::Omega => write!(f, "w"),
        }
    }
}

fn key(a: &PPoint, b: &PPoint) -> (PPoint, PPoint) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LcsPoset {
    points: BTreeSet<PPoint>,
    up: BTreeMap<PPoint, BTreeSet<PPoint>>,
    inf: BTreeMap<(PPoint, PPoint), BTreeSet<PPoint>>,
    supply: BTreeMap<PPoint, Supply>,
    floor: BTreeMap<PPoint, Ordinal>,
}

impl LcsPoset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &BTreeSet<PPoint> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &PPoint) -> bool {
        self.points.contains(p)
    }

    pub fn insert(&mut self, p: PPoint) -> bool {
        self.points.insert(p)
    }

    pub fn insert_lt(&mut self, a: PPoint, b: PPoint) {
        self.up.entry(a).or_default().insert(b);
    }

    pub fn set_inf(&mut self, a: &PPoint, b: &PPoint, v: BTreeSet<PPoint>) {
        if v.is_empty() {
            self.inf.remove(&key(a, b));
        } else {
            self.inf.insert(key(a, b), v);
        }
    }

    pub fn set_supply(&mut self, p: &PPoint, s: Supply) {
        if s == Supply::Finite(1) {
            self.supply.remove(p);
        } else {
            self.supply.insert(p.clone(), s);
        }
    }

    pub fn set_floor(&mut self, p: &PPoint, f: Ordinal) {
        if f.is_zero() {
            self.floor.remove(p);
        } else {
            self.floor.insert(p.clone(), f);
        }
    }

    pub fn supply(&self, p: &PPoint) -> Supply {
        self.supply.get(p).copied().unwrap_or(Supply::Finite(1))
    }

    pub fn floor(&self, p: &PPoint) -> Ordinal {
        self.floor.get(p).cloned().unwrap_or_else(Ordinal::zero)
    }

    pub fn lt(&self, a: &PPoint, b: &PPoint) -> bool {
        self.up.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn leq(&self, a: &PPoint, b: &PPoint) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn comparable(&self, a: &PPoint, b: &PPoint) -> bool {
        self.leq(a, b) || self.lt(b, a)
    }

    pub fn inf(&self, a: &PPoint, b: &PPoint) -> BTreeSet<PPoint> {
        self.inf.get(&key(a, b)).cloned().unwrap_or_default()
    }

    pub fn below(&self, p: &PPoint) -> BTreeSet<PPoint> {
        self.points.iter().filter(|x| self.lt(x, p)).cloned().collect()
    }

    pub fn above(&self, p: &PPoint) -> BTreeSet<PPoint> {
        self.up.get(p).cloned().unwrap_or_default()
    }

    pub fn less_iter(&self) -> impl Iterator<Item = (&PPoint, &PPoint)> + '_ {
        self.up.iter().flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }

    pub fn levels(&self) -> BTreeSet<Ordinal> {
        self.points.iter().map(|p| p.level.clone()).collect()
    }

    pub fn close_order(&mut self) {
        loop {
            let mut add = Vec::new();
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

    /// Sets `i{a, b} = {a}` for every `a < b`.
    pub fn fill_comparable_infima(&mut self) {
        let pairs: Vec<(PPoint, PPoint)> = self.less_iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        for (a, b) in pairs {
            self.set_inf(&a, &b, [a.clone()].into());
        }
    }

    /// Replicated points `w` with `x <= w` (including `x` itself), highest first.
    fn copy_chain(&self, x: &PPoint) -> Vec<PPoint> {
        let mut ch: Vec<PPoint> = std::iter::once(x)
            .chain(self.above(x).iter())
            .filter(|w| self.supply(w) != Supply::Finite(1))
            .cloned()
            .collect();
        ch.sort_by(|a, b| b.level.cmp(&a.level).then(b.cmp(a)));
        ch
    }

    /// Number of copies of `x` in the whole space.
    pub fn multiplicity(&self, x: &PPoint) -> Card {
        self.copy_chain(x).iter().fold(Card::Finite(1), |c, w| c.mul(self.supply(w).into()))
    }

    /// Cardinality of every occupied level, counting copies.
    pub fn level_cards(&self) -> BTreeMap<Ordinal, Card> {
        let mut out: BTreeMap<Ordinal, Card> = BTreeMap::new();
        for p in &self.points {
            let c = out.entry(p.level.clone()).or_insert(Card::Finite(0));
            *c = c.add(self.multiplicity(p));
        }
        out
    }

    /// Infinitely many copies of `v` lie below both `s` and `t`.
    fn infinitely_many_below(&self, v: &PPoint, s: &PPoint, t: &PPoint) -> bool {
        std::iter::once(v)
            .chain(self.above(v).iter())
            .any(|w| self.supply(w).is_omega() && self.lt(w, s) && self.lt(w, t))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out += &format!("{p}\n");
        }
        for (p, s) in &self.supply {
            out += &format!("supply {p} = {s}\n");
        }
        for (p, f) in &self.floor {
            out += &format!("floor {p} = {f}\n");
        }
        for (a, b) in self.less_iter() {
            out += &format!("order {a} < {b}\n");
        }
        for ((a, b), v) in &self.inf {
            let vs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            out += &format!("inf {{{a}, {b}}} = {{{}}}\n", vs.join(", "));
        }
        out
    }

    /// Parses the text format. The order is closed transitively.
    pub fn parse(text: &str) -> Result<LcsPoset, PosetError> {
        let mut p = LcsPoset::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| PosetError::Parse { line: i + 1, reason };
            let pt = |s: &str| s.parse::<PPoint>().map_err(err);
            let known = |p: &LcsPoset, x: &PPoint| if p.contains(x) { Ok(()) } else { Err(PosetError::UnknownPoint(x.to_string())) };
            if let Some(rest) = line.strip_prefix("order ") {
                let (a, b) = rest.split_once('<').ok_or_else(|| err("expected `order a < b`".into()))?;
                let (a, b) = (pt(a)?, pt(b)?);
                known(&p, &a)?;
                known(&p, &b)?;
                p.insert_lt(a, b);
            } else if let Some(rest) = line.strip_prefix("inf ") {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| err("expected `inf {a, b} = {...}`".into()))?;
                let set = |s: &str| -> Result<Vec<PPoint>, PosetError> {
                    let s = s.trim().strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(|| err(format!("`{s}` is not a braced set")))?;
                    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| pt(x)).collect()
                };
                let pair = set(lhs)?;
                if pair.len() != 2 {
                    return Err(err("the left side must name two points".into()));
                }
                let v: BTreeSet<PPoint> = set(rhs)?.into_iter().collect();
                for x in pair.iter().chain(v.iter()) {
                    known(&p, x)?;
                }
                p.set_inf(&pair[0], &pair[1], v);
            } else if let Some(rest) = line.strip_prefix("supply ") {
                let (a, s) = rest.rsplit_once('=').ok_or_else(|| err("expected `supply p = w|n`".into()))?;
                let a = pt(a)?;
                known(&p, &a)?;
                p.set_supply(&a, s.parse().map_err(err)?);
            } else if let Some(rest) = line.strip_prefix("floor ") {
                let (a, f) = rest.rsplit_once('=').ok_or_else(|| err("expected `floor p = ordinal`".into()))?;
                let a = pt(a)?;
                known(&p, &a)?;
                p.set_floor(&a, f.trim().parse().map_err(|e| err(format!("{e}")))?);
            } else {
                p.insert(pt(line)?);
            }
        }
        p.close_order();
        Ok(p)
    }

    /// Hasse diagram, one cluster per level.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=box];\n");
        let ids: BTreeMap<&PPoint, usize> = self.points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        for (lv, pts) in self.levels().iter().map(|l| (l, self.points.iter().filter(move |p| &p.level == l))) {
            out += &format!("  subgraph \"cluster_{lv}\" {{ label=\"level {lv}\";");
            for p in pts {
                let extra = match self.supply(p) {
                    Supply::Finite(1) => String::new(),
                    s => format!(" x{s}"),
                };
                out += &format!(" n{} [label=\"{p}{extra}\"];", ids[p]);
            }
            out += " }\n";
        }
        for (a, b) in self.less_iter() {
            let covered = self.up[a].iter().any(|m| self.lt(m, b));
            if !covered {
                out += &format!("  n{} -> n{};\n", ids[a], ids[b]);
            }
        }
        out + "}\n"
    }
}

impl fmt::Display for LcsPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Checks levels against the order, the infimum clauses on every pair of
/// materialized points, finiteness of infima once copies are counted,
/// privacy of replicated lower sets, and infinite predecessor sets through
/// supply-`w` points.
pub fn validate_poset(p: &LcsPoset) -> Report {
    let mut r = Report::new();
    for (a, b) in p.less_iter() {
        r.check(p.contains(a) && p.contains(b), "order-domain", || format!("{a} < {b} names an unknown point"));
        r.check(a != b, "order-irreflexive", || format!("{a} < {a}"));
        r.check(a.level < b.level, "order-level", || format!("{a} < {b} but the levels do not increase"));
        for c in p.above(b) {
            r.check(p.lt(a, &c), "order-transitive", || format!("{a} < {b} < {c} but not {a} < {c}"));
        }
    }
    let pts: Vec<&PPoint> = p.points.iter().collect();
    for (i, s) in pts.iter().enumerate() {
        for t in &pts[i + 1..] {
            let v = p.inf(s, t);
            for x in &v {
                r.check(p.contains(x), "inf-domain", || format!("i{{{s}, {t}}} names unknown {x}"));
                r.check(p.leq(x, s) && p.leq(x, t), "inf-below", || format!("{x} in i{{{s}, {t}}} is not below both"));
                r.check(!p.infinitely_many_below(x, s, t), "inf-finite", || {
                    format!("{x} in i{{{s}, {t}}} has infinitely many copies below both")
                });
            }
            for w in pts.iter().filter(|w| p.leq(w, s) && p.leq(w, t)) {
                r.check(v.iter().any(|x| p.leq(w, x)), "inf-dominates", || {
                    format!("{w} is below {s} and {t} but under no element of i")
                });
            }
        }
    }
    for x in pts.iter().filter(|x| p.supply(x) != Supply::Finite(1)) {
        let region: BTreeSet<PPoint> = p.below(x);
        let ups = p.above(x);
        for y in &region {
            for z in p.above(y) {
                r.check(&z == *x || region.contains(&z) || ups.contains(&z), "supply-private", || {
                    format!("{y} below replicated {x} is also below {z}, which is outside its region")
                });
            }
        }
    }
    let levels = p.levels();
    for t in &pts {
        let floor = p.floor(t);
        for a in levels.range(floor..t.level.clone()) {
            let ok = pts.iter().any(|w| {
                p.supply(w).is_omega() && p.lt(w, t) && (w.level == *a || pts.iter().any(|y| y.level == *a && p.lt(y, w)))
            });
            r.check(ok, "levels-infinite", || format!("{t} has only finitely many predecessors at level {a}"));
        }
    }
    r
}

/// The restriction to `keep`, which must contain every infimum of its pairs.
pub fn restrict(p: &LcsPoset, keep: &BTreeSet<PPoint>) -> Result<LcsPoset, PosetError> {
    let mut q = LcsPoset::new();
    for x in keep {
        if !p.contains(x) {
            return Err(PosetError::UnknownPoint(x.to_string()));
        }
        q.insert(x.clone());
        q.set_supply(x, p.supply(x));
        q.set_floor(x, p.floor(x));
    }
    let ks: Vec<&PPoint> = keep.iter().collect();
    for (i, s) in ks.iter().enumerate() {
        for t in &ks[i + 1..] {
            let v = p.inf(s, t);
            if let Some(x) = v.iter().find(|x| !keep.contains(*x)) {
                return Err(PosetError::NotInfimumClosed { s: s.to_string(), t: t.to_string(), v: x.to_string() });
            }
            q.set_inf(s, t, v);
        }
    }
    for (a, b) in p.less_iter() {
        if keep.contains(a) && keep.contains(b) {
            q.insert_lt(a.clone(), b.clone());
        }
    }
    Ok(q)
}

/// A concrete copy: the point and one index per replicated point above or at
/// it, highest first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Replica {
    pub point: PPoint,
    pub index: Vec<u32>,
}

impl fmt::Display for Replica {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.point)?;
        if !self.index.is_empty() {
            let ix: Vec<String> = self.index.iter().map(|i| i.to_string()).collect();
            write!(f, "#{}", ix.join("."))?;
        }
        Ok(())
    }
}

/// The finite poset obtained by taking `k` copies of every supply-`w` point
/// and `n` of every supply-`n` point.
#[derive(Debug, Clone)]
pub struct Instance {
    pub copies: Vec<Replica>,
    /// `lt[i][j]`: copy `i` is strictly below copy `j`.
    pub lt: Vec<Vec<bool>>,
    /// Copy `i` stands for infinitely many points of the space.
    pub replicated: Vec<bool>,
}

pub fn instantiate(p: &LcsPoset, k: u32) -> Instance {
    let mut copies = Vec::new();
    let mut chains = Vec::new();
    let mut replicated = Vec::new();
    for x in &p.points {
        let chain = p.copy_chain(x);
        let dims: Vec<u32> = chain.iter().map(|w| p.supply(w).copies(k)).collect();
        let mut idx = vec![0u32; dims.len()];
        if dims.contains(&0) {
            continue;
        }
        loop {
            copies.push(Replica { point: x.clone(), index: idx.clone() });
            chains.push(chain.clone());
            replicated.push(chain.iter().any(|w| p.supply(w) == Supply::Omega));
            let mut d = dims.len();
            loop {
                if d == 0 {
                    break;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < dims[d] {
                    break;
                }
                idx[d] = 0;
            }
            if idx.iter().all(|&v| v == 0) {
                break;
            }
        }
    }
    let n = copies.len();
    let mut lt = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&copies[i], &copies[j]);
            if !p.lt(&a.point, &b.point) {
                continue;
            }
            // the chain of b is the top part of the chain of a
            let cb = &chains[j];
            lt[i][j] = cb.iter().zip(&b.index).all(|(w, ix)| {
                let pos = chains[i].iter().position(|v| v == w).expect("chains nest");
                a.index[pos] == *ix
            });
        }
    }
    Instance { copies, lt, replicated }
}

impl Instance {
    pub fn find(&self, c: &Replica) -> Option<usize> {
        self.copies.iter().position(|x| x == c)
    }
}

/// `C(x) minus the union of C(e)` over `e` in `excl`, each `e` strictly below `x`.
pub fn basic_open(inst: &Instance, x: usize, excl: &[usize]) -> Result<BTreeSet<usize>, PosetError> {
    for &e in excl {
        if !inst.lt[e][x] {
            return Err(PosetError::ExclNotBelow { x: inst.copies[x].to_string(), excl: inst.copies[e].to_string() });
        }
    }
    let down = |y: usize| (0..inst.copies.len()).filter(move |&z| z == y || inst.lt[z][y]);
    let mut out: BTreeSet<usize> = down(x).collect();
    for &e in excl {
        for z in down(e) {
            out.remove(&z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;

    fn pp(s: &str) -> PPoint {
        s.parse().unwrap()
    }

    #[test]
    fn single_omega_level_is_valid() {
        let p = LcsPoset::parse("0/a\nsupply 0/a = w\n").unwrap();
        assert!(validate_poset(&p).is_ok());
        assert_eq!(p.level_cards()[&ord("0")], Card::Omega);
    }

    #[test]
    fn same_level_order_is_rejected() {
        let p = LcsPoset::parse("1/s\n1/t\norder 1/s < 1/t\ninf {1/s, 1/t} = {1/s}\n").unwrap();
        assert!(validate_poset(&p).has_rule("order-level"));
    }

    #[test]
    fn omega_class_below_a_point() {
        let text = "0/a\n1/t\nsupply 0/a = w\norder 0/a < 1/t\ninf {0/a, 1/t} = {0/a}\n";
        let p = LcsPoset::parse(text).unwrap();
        assert!(validate_poset(&p).is_ok(), "{}", validate_poset(&p));
        // without the supply the level-1 point has one predecessor
        let q = LcsPoset::parse(&text.replace("supply 0/a = w\n", "")).unwrap();
        assert!(validate_poset(&q).has_rule("levels-infinite"));
        // a floor above level 0 waives it
        let q = LcsPoset::parse(&text.replace("supply 0/a = w\n", "floor 1/t = 1\n")).unwrap();
        assert!(validate_poset(&q).is_ok());
    }

    #[test]
    fn infimum_clauses() {
        let base = "0/u\n1/a\n1/b\norder 0/u < 1/a\norder 0/u < 1/b\ninf {0/u, 1/a} = {0/u}\ninf {0/u, 1/b} = {0/u}\nfloor 1/a = 1\nfloor 1/b = 1\n";
        let ok = LcsPoset::parse(&format!("{base}inf {{1/a, 1/b}} = {{0/u}}\n")).unwrap();
        assert!(validate_poset(&ok).is_ok(), "{}", validate_poset(&ok));
        let missing = LcsPoset::parse(base).unwrap();
        assert!(validate_poset(&missing).has_rule("inf-dominates"));
        // an omega class as the common lower bound makes the infimum infinite
        let inf = LcsPoset::parse(&format!("{base}supply 0/u = w\ninf {{1/a, 1/b}} = {{0/u}}\n")).unwrap();
        assert!(validate_poset(&inf).has_rule("inf-finite"));
    }

    #[test]
    fn replicated_region_must_be_private() {
        let text = "0/y\n1/x\n2/z\nsupply 1/x = w\norder 0/y < 1/x\norder 0/y < 2/z\ninf {0/y, 1/x} = {0/y}\ninf {0/y, 2/z} = {0/y}\ninf {1/x, 2/z} = {0/y}\n";
        let p = LcsPoset::parse(text).unwrap();
        assert!(validate_poset(&p).has_rule("supply-private"));
    }

    #[test]
    fn text_round_trip_and_dot() {
        let text = "0/a\n1/t\nsupply 0/a = w\norder 0/a < 1/t\ninf {0/a, 1/t} = {0/a}\n";
        let p = LcsPoset::parse(text).unwrap();
        assert_eq!(LcsPoset::parse(&p.to_text()).unwrap(), p);
        let dot = p.to_dot();
        assert!(dot.contains("n0 -> n1") && dot.contains("xw"));
        assert!(matches!(LcsPoset::parse("order 0/a < 1/b"), Err(PosetError::UnknownPoint(_))));
        assert!(matches!(LcsPoset::parse("0/a b"), Err(PosetError::Parse { line: 1, .. })));
    }

    #[test]
    fn restriction() {
        let text = "0/u\n1/a\n1/b\norder 0/u < 1/a\norder 0/u < 1/b\ninf {0/u, 1/a} = {0/u}\ninf {0/u, 1/b} = {0/u}\ninf {1/a, 1/b} = {0/u}\n";
        let p = LcsPoset::parse(text).unwrap();
        assert_eq!(restrict(&p, p.points()).unwrap(), p);
        let lvl: BTreeSet<PPoint> = [pp("1/a"), pp("1/b")].into();
        assert!(matches!(restrict(&p, &lvl), Err(PosetError::NotInfimumClosed { .. })));
        let one: BTreeSet<PPoint> = [pp("1/a")].into();
        let q = restrict(&p, &one).unwrap();
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn basic_open_sets() {
        let p = LcsPoset::parse("0/a\n1/t\nsupply 0/a = w\norder 0/a < 1/t\ninf {0/a, 1/t} = {0/a}\n").unwrap();
        let inst = instantiate(&p, 3);
        assert_eq!(inst.copies.len(), 4);
        let t = inst.find(&Replica { point: pp("1/t"), index: vec![] }).unwrap();
        let a1 = inst.find(&Replica { point: pp("0/a"), index: vec![1] }).unwrap();
        assert_eq!(basic_open(&inst, a1, &[]).unwrap(), [a1].into());
        assert_eq!(basic_open(&inst, t, &[]).unwrap().len(), 4);
        let o = basic_open(&inst, t, &[a1]).unwrap();
        assert_eq!(o.len(), 3);
        assert!(!o.contains(&a1) && o.contains(&t));
        assert!(matches!(basic_open(&inst, a1, &[t]), Err(PosetError::ExclNotBelow { .. })));
    }

    #[test]
    fn nested_replicas_are_private() {
        // each copy of x has its own copies of y
        let p = LcsPoset::parse("0/y\n1/x\n2/t\nsupply 0/y = 2\nsupply 1/x = 2\norder 0/y < 1/x\norder 1/x < 2/t\ninf {0/y, 1/x} = {0/y}\ninf {1/x, 2/t} = {1/x}\ninf {0/y, 2/t} = {0/y}\n").unwrap();
        let inst = instantiate(&p, 3);
        assert_eq!(inst.copies.len(), 4 + 2 + 1);
        let x0 = inst.find(&Replica { point: pp("1/x"), index: vec![0] }).unwrap();
        assert_eq!(basic_open(&inst, x0, &[]).unwrap().len(), 3);
        assert_eq!(p.multiplicity(&pp("0/y")), Card::Finite(4));
    }
}
