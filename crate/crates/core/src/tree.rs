//! The tree of ordinal intervals: levels `I_n`, the closed cofinal sets `E(I)`,
//! the drop-down points `gamma(I)`, and the derived queries `I(a, n)`, `l(a)`, `J(z)`.
//!
//! Everything is computed lazily and memoized. Big points get sequences of
//! order type omega, of which only finite prefixes are ever demanded.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};
use crate::report::Report;
use crate::universe::{SplitResult, UniverseSpec};

/// Hard stop for descending the tree; every ordinal of a desk universe becomes
/// a left endpoint long before this.
pub const MAX_DEPTH: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("interval {0} is not in the tree")]
    NotInTree(Interval),
    #[error("gamma is only defined for intervals ending at a designated Big point, not {0}")]
    NotApplicable(Interval),
    #[error("no ordinal of cofinality omega inside {0} carries a Big tail of f up to its end")]
    NoWitness(Interval),
    #[error("ordinal {0} lies outside [0, delta)")]
    OutOfUniverse(Ordinal),
    #[error("J is undefined at 0")]
    ZeroArgument,
    #[error("descent for {0} exceeded {MAX_DEPTH} levels")]
    DepthExceeded(Ordinal),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

/// `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Ordinal,
    pub hi: Ordinal,
}

impl Interval {
    pub fn new(lo: Ordinal, hi: Ordinal) -> Self {
        Interval { lo, hi }
    }

    pub fn singleton(a: &Ordinal) -> Self {
        Interval { lo: a.clone(), hi: a.succ() }
    }

    pub fn contains(&self, a: &Ordinal) -> bool {
        &self.lo <= a && a < &self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn is_disjoint_from(&self, other: &Interval) -> bool {
        self.hi <= other.lo || other.hi <= self.lo
    }

    pub fn is_finite(&self) -> bool {
        Ordinal::ot_diff(&self.lo, &self.hi).map(|d| d.is_finite()).unwrap_or(false)
    }

    pub fn is_singleton(&self) -> bool {
        self.hi == self.lo.succ()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            write!(f, "{{{}}}", self.lo)
        } else {
            write!(f, "[{}, {})", self.lo, self.hi)
        }
    }
}

/// The increasing enumeration `E(I)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ESeq {
    Finite(Vec<Ordinal>),
    /// `forced` first, then `fs(limit, m) + 1` for `m = start, start+1, ...`.
    Omega { forced: Vec<Ordinal>, limit: Ordinal, start: u64 },
}

/// Least `m >= start` with `fs(limit, m) >= a`.
fn first_index_at_least(limit: &Ordinal, a: &Ordinal, start: u64) -> Result<u64, OrdinalError> {
    let mut m = limit.fundamental_index_above(a)?;
    if m > 0 && &limit.fundamental(m - 1)? == a {
        m -= 1;
    }
    Ok(m.max(start))
}

impl ESeq {
    pub fn is_finite(&self) -> bool {
        matches!(self, ESeq::Finite(_))
    }

    pub fn get(&self, i: usize) -> Option<Ordinal> {
        match self {
            ESeq::Finite(v) => v.get(i).cloned(),
            ESeq::Omega { forced, limit, start } => {
                if i < forced.len() {
                    return Some(forced[i].clone());
                }
                let m = start + (i - forced.len()) as u64;
                Some(limit.fundamental(m).expect("limit").succ())
            }
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<Ordinal> {
        (0..n).map_while(|i| self.get(i)).collect()
    }

    /// Position of the largest element `<= a`; `a` must be at least the first element.
    pub fn index_at_or_below(&self, a: &Ordinal) -> usize {
        match self {
            ESeq::Finite(v) => v.partition_point(|x| x <= a).saturating_sub(1),
            ESeq::Omega { forced, limit, start } => {
                let within = forced.partition_point(|x| x <= a);
                if within < forced.len() {
                    return within.saturating_sub(1);
                }
                // least m with fs(m) + 1 > a, i.e. fs(m) >= a
                let m = first_index_at_least(limit, a, *start).expect("limit");
                forced.len() + (m - start) as usize - 1
            }
        }
    }

    pub fn index_of(&self, a: &Ordinal) -> Option<usize> {
        let first = self.get(0)?;
        if a < &first {
            return None;
        }
        let i = self.index_at_or_below(a);
        (self.get(i).as_ref() == Some(a)).then_some(i)
    }

    pub fn contains(&self, a: &Ordinal) -> bool {
        self.index_of(a).is_some()
    }

    /// Elements strictly below `bound`, at most `cap` of them.
    pub fn elements_below(&self, bound: &Ordinal, cap: usize) -> Vec<Ordinal> {
        let mut out = Vec::new();
        for i in 0.. {
            if out.len() >= cap {
                break;
            }
            match self.get(i) {
                Some(x) if &x < bound => out.push(x),
                _ => break,
            }
        }
        out
    }
}

/// Lazily materialized tree of intervals over a universe.
#[derive(Debug)]
pub struct IntervalTree {
    u: UniverseSpec,
    e_cache: Mutex<HashMap<Interval, ESeq>>,
    gamma_cache: Mutex<HashMap<Interval, Result<Ordinal, TreeError>>>,
    path_cache: Mutex<HashMap<Ordinal, Vec<Interval>>>,
}

impl IntervalTree {
    pub fn new(u: UniverseSpec) -> Self {
        IntervalTree {
            u,
            e_cache: Mutex::new(HashMap::new()),
            gamma_cache: Mutex::new(HashMap::new()),
            path_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn universe(&self) -> &UniverseSpec {
        &self.u
    }

    pub fn root(&self) -> Interval {
        Interval::new(Ordinal::zero(), self.u.delta.clone())
    }

    fn check_in_universe(&self, a: &Ordinal) -> Result<(), TreeError> {
        if a >= &self.u.delta {
            Err(TreeError::OutOfUniverse(a.clone()))
        } else {
            Ok(())
        }
    }

    /// `E(I)` for an interval known to be in the tree.
    pub fn e_seq(&self, i: &Interval) -> Result<ESeq, TreeError> {
        if let Some(e) = self.e_cache.lock().expect("cache").get(i) {
            return Ok(e.clone());
        }
        let e = self.compute_e(i)?;
        self.e_cache.lock().expect("cache").entry(i.clone()).or_insert(e.clone());
        Ok(e)
    }

    fn compute_e(&self, i: &Interval) -> Result<ESeq, TreeError> {
        let (lo, hi) = (&i.lo, &i.hi);
        if let Some(last) = hi.pred() {
            if i.is_finite() {
                let n = Ordinal::ot_diff(lo, hi)?.as_nat().expect("finite");
                return Ok(ESeq::Finite((0..n).map(|k| lo.plus_nat(k)).collect()));
            }
            let lim = hi.limit_part();
            let mut v = vec![lo.clone()];
            let mut x = lim;
            while x <= last {
                v.push(x.clone());
                x = x.succ();
            }
            return Ok(ESeq::Finite(v));
        }
        let mut forced = vec![lo.clone()];
        if self.u.in_l(hi) {
            let g = self.gamma(i)?;
            if &g < hi {
                forced.push(g.clone());
                forced.push(g.plus_nat(2));
            }
        }
        let start = first_index_at_least(hi, forced.last().expect("nonempty"), 0)?;
        Ok(ESeq::Omega { forced, limit: hi.clone(), start })
    }

    fn child_at(&self, i: &Interval, e: &ESeq, idx: usize) -> Interval {
        let lo = e.get(idx).expect("index in range");
        let hi = e.get(idx + 1).unwrap_or_else(|| i.hi.clone());
        Interval::new(lo, hi)
    }

    fn child_containing(&self, i: &Interval, a: &Ordinal) -> Result<Interval, TreeError> {
        let e = self.e_seq(i)?;
        let idx = e.index_at_or_below(a);
        Ok(self.child_at(i, &e, idx))
    }

    /// The first `limit` children of `I`, or all of them when there are fewer.
    pub fn children(&self, i: &Interval, limit: usize) -> Result<Vec<Interval>, TreeError> {
        self.level_of(i)?;
        let e = self.e_seq(i)?;
        let n = match &e {
            ESeq::Finite(v) => v.len().min(limit),
            ESeq::Omega { .. } => limit,
        };
        Ok((0..n).map(|k| self.child_at(i, &e, k)).collect())
    }

    /// `I(a, 0), ..., I(a, n)`.
    pub fn path(&self, a: &Ordinal, n: usize) -> Result<Vec<Interval>, TreeError> {
        self.check_in_universe(a)?;
        if n > MAX_DEPTH {
            return Err(TreeError::DepthExceeded(a.clone()));
        }
        let mut p = self
            .path_cache
            .lock()
            .expect("cache")
            .get(a)
            .cloned()
            .unwrap_or_else(|| vec![self.root()]);
        if p.len() > n {
            p.truncate(n + 1);
            return Ok(p);
        }
        while p.len() <= n {
            let next = self.child_containing(p.last().expect("nonempty"), a)?;
            p.push(next);
        }
        let mut cache = self.path_cache.lock().expect("cache");
        let slot = cache.entry(a.clone()).or_default();
        if slot.len() < p.len() {
            *slot = p.clone();
        }
        Ok(p)
    }

    /// `I(a, n)`: the member of level `n` containing `a`.
    pub fn locate(&self, a: &Ordinal, n: usize) -> Result<Interval, TreeError> {
        Ok(self.path(a, n)?.pop().expect("nonempty"))
    }

    /// `l(a)`: the first level at which `a` is a left endpoint.
    pub fn first_level(&self, a: &Ordinal) -> Result<usize, TreeError> {
        self.check_in_universe(a)?;
        for n in 0..=MAX_DEPTH {
            if &self.locate(a, n)?.lo == a {
                return Ok(n);
            }
        }
        Err(TreeError::DepthExceeded(a.clone()))
    }

    /// The level of an interval; singletons report the first level they occur at.
    pub fn level_of(&self, i: &Interval) -> Result<usize, TreeError> {
        if i.lo >= i.hi || i.hi > self.u.delta {
            return Err(TreeError::NotInTree(i.clone()));
        }
        for n in 0..=MAX_DEPTH {
            let c = self.locate(&i.lo, n)?;
            if &c == i {
                return Ok(n);
            }
            if c.is_subset_of(i) {
                return Err(TreeError::NotInTree(i.clone()));
            }
        }
        Err(TreeError::DepthExceeded(i.lo.clone()))
    }

    /// `gamma(I)` for a tree interval ending at a designated point where `f` is Big.
    pub fn gamma(&self, i: &Interval) -> Result<Ordinal, TreeError> {
        if !self.u.in_l(&i.hi) {
            return Err(TreeError::NotApplicable(i.clone()));
        }
        if let Some(g) = self.gamma_cache.lock().expect("cache").get(i) {
            return g.clone();
        }
        let g = self.compute_gamma(i);
        self.gamma_cache.lock().expect("cache").insert(i.clone(), g.clone());
        g
    }

    fn compute_gamma(&self, i: &Interval) -> Result<Ordinal, TreeError> {
        let n = self.level_of(i)?;
        let ancestors = self.path(&i.lo, n)?;
        for j in ancestors.iter().take(n).skip(1) {
            if self.u.in_l(&j.hi) {
                let gj = self.gamma(j)?;
                if gj < i.lo && i.hi <= j.hi {
                    return Ok(i.hi.clone());
                }
            }
        }
        let span = self.u.f_big.span_of(&i.hi).ok_or_else(|| TreeError::NoWitness(i.clone()))?;
        let from = std::cmp::max(span.lo.clone(), i.lo.succ());
        let mut g = if from.is_limit() { from } else { from.limit_part().add(&Ordinal::omega()) };
        while self.u.big.contains(&g) {
            g = g.add(&Ordinal::omega());
        }
        if g < i.hi {
            Ok(g)
        } else {
            Err(TreeError::NoWitness(i.clone()))
        }
    }

    /// `J(z)`: the interval of level `l(z)` ending at `z`.
    pub fn j_interval(&self, z: &Ordinal) -> Result<Interval, TreeError> {
        if z.is_zero() {
            return Err(TreeError::ZeroArgument);
        }
        let l = self.first_level(z)?;
        let parent = self.locate(z, l - 1)?;
        let e = self.e_seq(&parent)?;
        // z is a left endpoint at level l, hence a non-initial member of E(parent),
        // and every non-initial member has an immediate predecessor at desk scale
        let idx = e.index_of(z).expect("left endpoint lies in E of its parent");
        Ok(Interval::new(e.get(idx - 1).expect("idx > 0"), z.clone()))
    }

    /// Levels `0..=depth`, keeping the first `width` children of each interval.
    pub fn materialize(&self, depth: usize, width: usize) -> Result<Vec<Vec<Interval>>, TreeError> {
        let mut levels = vec![vec![self.root()]];
        for _ in 0..depth {
            let mut next = Vec::new();
            for i in levels.last().expect("nonempty") {
                let e = self.e_seq(i)?;
                let n = match &e {
                    ESeq::Finite(v) => v.len().min(width),
                    ESeq::Omega { .. } => width,
                };
                next.extend((0..n).map(|k| self.child_at(i, &e, k)));
            }
            levels.push(next);
        }
        Ok(levels)
    }

    /// Structural checks of `E(I)` on a prefix: starts at `I-`, increases, stays
    /// inside `I`, and has successor entries where required.
    pub fn check_e(&self, i: &Interval, prefix: usize) -> Result<Report, TreeError> {
        let mut r = Report::new();
        let e = self.e_seq(i)?;
        let xs = e.prefix(prefix);
        r.check(xs.first() == Some(&i.lo), "E-starts-at-left-end", || format!("E({i}) starts at {:?}", xs.first()));
        for w in xs.windows(2) {
            r.check(w[0] < w[1], "E-increasing", || format!("E({i}) has {} then {}", w[0], w[1]));
        }
        for x in &xs {
            r.check(i.contains(x), "E-inside", || format!("{x} in E({i}) lies outside"));
        }
        if let ESeq::Omega { forced, .. } = &e {
            r.check(i.hi.is_limit(), "E-omega-limit-end", || format!("{i} has an omega-type E but a successor end"));
            let free_from = if forced.len() == 3 { 3 } else { 1 };
            for (k, x) in xs.iter().enumerate().skip(free_from) {
                r.check(x.is_successor(), "E-successor", || format!("entry {k} of E({i}) is {x}"));
            }
            if forced.len() == 3 {
                let g = self.gamma(i)?;
                r.check(forced[1] == g && forced[2] == g.plus_nat(2), "E-forced", || format!("E({i}) forced entries {forced:?}"));
            }
        }
        Ok(r)
    }

    /// Tree facts (i)-(v) and `E` shape on a materialization, plus partition,
    /// refinement and left-endpoint checks through `locate` on sample points.
    pub fn check_tree_facts(&self, depth: usize, width: usize, samples: &[Ordinal]) -> Result<Report, TreeError> {
        let mut r = Report::new();
        let levels = self.materialize(depth, width)?;
        let all: BTreeSet<&Interval> = levels.iter().flatten().collect();
        let all: Vec<&Interval> = all.into_iter().collect();
        for (a, i) in all.iter().enumerate() {
            for j in &all[a + 1..] {
                let nested = i.is_subset_of(j) || j.is_subset_of(i);
                r.check(nested || i.is_disjoint_from(j), "fact-i", || format!("{i} and {j} overlap"));
                for (small, big) in [(i, j), (j, i)] {
                    if small.is_subset_of(big) && big.hi.is_limit() {
                        r.check(small.hi < big.hi, "fact-ii", || format!("{small} inside {big} shares its limit end"));
                    }
                }
            }
        }
        for (n, level) in levels.iter().enumerate().take(depth) {
            for i in level {
                r.extend(self.check_e(i, width + 1)?);
                let kids = self.children(i, width)?;
                r.check(kids.first().map(|k| &k.lo) == Some(&i.lo), "fact-iii", || format!("children of {i} do not start at its left end"));
                for w in kids.windows(2) {
                    r.check(w[0].hi == w[1].lo && w[0].lo < w[0].hi, "fact-iii", || format!("children {} and {} of {i} are not consecutive", w[0], w[1]));
                }
                for k in &kids {
                    r.check(k.is_subset_of(i), "fact-iv", || format!("child {k} of {i} at level {} escapes", n + 1));
                }
                if self.e_seq(i)?.is_finite() {
                    r.check(kids.last().map(|k| &k.hi) == Some(&i.hi), "fact-iii", || format!("children of {i} do not reach its end"));
                }
            }
        }
        for a in samples {
            if a >= &self.u.delta {
                continue;
            }
            let p = self.path(a, depth)?;
            for (n, w) in p.windows(2).enumerate() {
                r.check(w[1].is_subset_of(&w[0]), "fact-iv", || format!("I({a},{}) = {} not inside I({a},{n}) = {}", n + 1, w[1], w[0]));
            }
            for (n, i) in p.iter().enumerate() {
                r.check(i.contains(a), "fact-iii", || format!("I({a},{n}) = {i} misses {a}"));
                r.check(self.level_of(i).is_ok(), "fact-iii", || format!("I({a},{n}) = {i} is not a tree interval"));
            }
            match self.first_level(a) {
                Ok(l) => {
                    let i = self.locate(a, l)?;
                    r.check(&i.lo == a, "fact-v", || format!("I({a},{l}) = {i}"));
                }
                Err(e) => r.push("fact-v", format!("{a}: {e}")),
            }
        }
        Ok(r)
    }

    /// Conditions (*)(1)-(8) for the split of this tree's universe.
    pub fn check_star(&self, s: &SplitResult) -> Result<Report, TreeError> {
        let mut r = Report::new();
        for b in self.u.l_set() {
            if !s.l_tilde.contains(b) {
                let covered = s.l_tilde.iter().any(|b2| &s.gamma_of[b2] < b && b < b2);
                r.check(covered, "star-1", || format!("{b} lies in no (gamma_b', b')"));
            }
        }
        let lt: Vec<&Ordinal> = s.l_tilde.iter().collect();
        for (k, b) in lt.iter().enumerate() {
            let b = *b;
            let g = &s.gamma_of[b];
            let lb = self.first_level(b)?;
            let lg = self.first_level(g)?;
            let pair = Interval::new(g.clone(), g.plus_nat(2));
            r.check(lg == lb + 1, "star-2", || format!("l({g}) = {lg}, l({b}) = {lb}"));
            r.check(self.locate(b, lb)? == Interval::singleton(b), "star-2", || format!("I({b}, l({b})) is not a singleton"));
            r.check(self.locate(g, lb + 1)? == pair, "star-2", || format!("I({g}, {}) is not {pair}", lb + 1));

            for b2 in &lt[k + 1..] {
                let g2 = &s.gamma_of[*b2];
                r.check(b < g2 || *b2 < g, "star-3", || format!("[{g}, {b}] meets [{g2}, {b2}]"));
            }

            let jb = self.j_interval(b)?;
            let n = self.level_of(&jb)?;
            let jg = self.j_interval(g)?;
            r.check(self.locate(g, n)? == jb, "star-4", || format!("I({g}, {n}) differs from J({b}) = {jb}"));
            r.check(self.level_of(&jg)? == n + 1, "star-4", || format!("J({g}) = {jg} not at level {}", n + 1));
            r.check(self.locate(g, n + 1)? == pair, "star-4", || format!("{pair} not at level {}", n + 1));

            let up = self.locate(b, lb - 1)?;
            r.check(jb == Interval::new(up.lo.clone(), b.clone()), "star-5", || format!("J({b}) = {jb}, I({b}, l-1) = {up}"));

            r.check(self.locate(g, lb - 1)? == up, "star-6", || format!("I({g}, l({b})-1) differs from {up}"));
            r.check(jg == Interval::new(up.lo.clone(), g.clone()), "star-6", || format!("J({g}) = {jg}"));

            let gp = self.path(g, n + 2)?;
            for m in 0..=n + 1 {
                if gp[m] != jb && jb.is_subset_of(&gp[m]) {
                    r.check(gp[m + 1] != pair && pair.is_subset_of(&gp[m + 1]), "star-7", || {
                        format!("I({g}, {}) = {} is not a proper superset of {pair}", m + 1, gp[m + 1])
                    });
                }
                if gp[m] != pair && pair.is_subset_of(&gp[m]) {
                    r.check(g > &gp[m].lo, "star-8", || format!("{} contains {pair} but starts at {g}", gp[m]));
                }
            }
        }
        Ok(r)
    }

    /// Intervals of levels `0..=depth` meeting any of `points`.
    pub fn levels_meeting(&self, points: &[Ordinal], depth: usize) -> Result<Vec<Vec<Interval>>, TreeError> {
        let mut out = vec![BTreeSet::new(); depth + 1];
        for a in points {
            for (n, i) in self.path(a, depth)?.into_iter().enumerate() {
                out[n].insert(i);
            }
        }
        Ok(out.into_iter().map(|s| s.into_iter().collect()).collect())
    }
}

/// DOT export of the containment tree on the given levels.
pub fn levels_to_dot(levels: &[Vec<Interval>]) -> String {
    let mut out = String::from("digraph intervals {\n  node [shape=box];\n");
    let id = |n: usize, i: &Interval| format!("\"{n}:{i}\"");
    for (n, level) in levels.iter().enumerate() {
        for i in level {
            out.push_str(&format!("  {} [label=\"{i}\"];\n", id(n, i)));
            if n > 0 {
                if let Some(p) = levels[n - 1].iter().find(|p| i.is_subset_of(p)) {
                    out.push_str(&format!("  {} -> {};\n", id(n - 1, p), id(n, i)));
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use crate::universe::{split_f, Span, SpanSet};

    fn iv(a: &str, b: &str) -> Interval {
        Interval::new(ord(a), ord(b))
    }

    fn ustar() -> IntervalTree {
        IntervalTree::new(UniverseSpec::u_star())
    }

    #[test]
    fn children_of_root_and_first_big_interval() {
        let t = ustar();
        let root = t.root();
        assert_eq!(t.children(&root, 3).unwrap(), vec![iv("0", "w^2+1"), iv("w^2+1", "w^2+w+1"), iv("w^2+w+1", "w^2+w*2+1")]);
        assert_eq!(t.children(&iv("0", "w^2+1"), 5).unwrap(), vec![iv("0", "w^2"), iv("w^2", "w^2+1")]);
        assert_eq!(
            t.children(&iv("0", "w^2"), 4).unwrap(),
            vec![iv("0", "w"), iv("w", "w+2"), iv("w+2", "w*2+1"), iv("w*2+1", "w*3+1")]
        );
        assert!(matches!(t.children(&iv("0", "w*5"), 1), Err(TreeError::NotInTree(_))));
    }

    #[test]
    fn gamma_cases() {
        let t = ustar();
        assert_eq!(t.gamma(&iv("0", "w^2")).unwrap(), ord("w"));
        assert!(matches!(t.gamma(&iv("0", "w")), Err(TreeError::NotApplicable(_))));
        let tight = UniverseSpec {
            delta: ord("w^2"),
            lambda: 2,
            big: [ord("w*2")].into_iter().collect(),
            f_big: SpanSet::from_spans([Span::closed(ord("w+1"), &ord("w*2"))]),
        };
        let t2 = IntervalTree::new(tight);
        assert!(matches!(t2.gamma(&iv("w+1", "w*2")), Err(TreeError::NoWitness(_))));
    }

    #[test]
    fn locate_and_levels() {
        let t = ustar();
        assert_eq!(t.locate(&ord("0"), 0).unwrap(), t.root());
        assert_eq!(t.locate(&ord("w^2"), 2).unwrap(), Interval::singleton(&ord("w^2")));
        assert_eq!(t.locate(&ord("w+1"), 3).unwrap(), iv("w", "w+2"));
        assert_eq!(t.first_level(&ord("0")).unwrap(), 0);
        assert_eq!(t.first_level(&ord("w^2")).unwrap(), 2);
        assert_eq!(t.first_level(&ord("w")).unwrap(), 3);
        assert!(matches!(t.locate(&ord("w^2*2"), 1), Err(TreeError::OutOfUniverse(_))));
    }

    #[test]
    fn j_examples() {
        let t = ustar();
        assert_eq!(t.j_interval(&ord("w^2")).unwrap(), iv("0", "w^2"));
        assert_eq!(t.j_interval(&ord("w")).unwrap(), iv("0", "w"));
        assert_eq!(t.j_interval(&ord("w+1")).unwrap(), Interval::singleton(&ord("w")));
        assert_eq!(t.j_interval(&ord("0")), Err(TreeError::ZeroArgument));
    }

    #[test]
    fn star_and_facts_on_u_star() {
        let t = ustar();
        let s = split_f(t.universe(), &t).unwrap();
        assert_eq!(s.l_tilde.iter().cloned().collect::<Vec<_>>(), vec![ord("w^2")]);
        let r = t.check_star(&s).unwrap();
        assert!(r.is_ok(), "{r}");
        let samples: Vec<Ordinal> = ["0", "1", "w", "w+1", "w^2", "w^2+w+3", "w*7+2"].iter().map(|x| ord(x)).collect();
        let r = t.check_tree_facts(5, 4, &samples).unwrap();
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn e_sequence_is_stable() {
        let t = ustar();
        let i = iv("0", "w^2");
        let a = t.e_seq(&i).unwrap().prefix(8);
        let b = t.e_seq(&i).unwrap().prefix(8);
        assert_eq!(a, b);
        let e = t.e_seq(&i).unwrap();
        assert_eq!(e.index_of(&ord("w*3+1")), Some(4));
        assert_eq!(e.index_of(&ord("w*3")), None);
        assert_eq!(e.elements_below(&ord("w*2+1"), 10), vec![ord("0"), ord("w"), ord("w+2")]);
    }

    #[test]
    fn shadow_case_gives_gamma_equal_to_end() {
        // a second big point strictly above gamma of the first one's J-interval
        let u = UniverseSpec {
            delta: ord("w^3"),
            lambda: 2,
            big: [ord("w^2*2"), ord("w^2+w*5")].into_iter().collect(),
            f_big: SpanSet::from_spans([Span::closed(ord("w^2"), &ord("w^2*2"))]),
        };
        let t = IntervalTree::new(u.clone());
        let s = split_f(&u, &t).unwrap();
        let inner = ord("w^2+w*5");
        assert!(u.in_l(&inner));
        assert_eq!(s.gamma_of[&inner], inner);
        assert!(!s.l_tilde.contains(&inner));
        assert!(t.check_star(&s).unwrap().is_ok());
        assert!(s.check_invariants(&u).is_ok());
    }
}
