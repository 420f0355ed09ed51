//! Universe specifications: the height `delta`, the Small/Big pattern `f`, the
//! designated big-cofinality points, and the `f = f0 + f1` decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{CofClass, Ordinal, OrdinalError};
use crate::report::Report;
use crate::tree::{IntervalTree, TreeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("ordinal {0} lies beyond delta")]
    OutOfUniverse(Ordinal),
    #[error("tree was built for a different universe")]
    TreeMismatch,
    #[error("universe file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error(transparent)]
    Tree(#[from] Box<TreeError>),
}

/// Half-open span `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub lo: Ordinal,
    pub hi: Ordinal,
}

impl Span {
    pub fn new(lo: Ordinal, hi: Ordinal) -> Self {
        Span { lo, hi }
    }

    /// `[lo, hi]`.
    pub fn closed(lo: Ordinal, hi: &Ordinal) -> Self {
        Span { lo, hi: hi.succ() }
    }

    pub fn contains(&self, a: &Ordinal) -> bool {
        &self.lo <= a && a < &self.hi
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi.pred() {
            Some(p) => write!(f, "[{}, {}]", self.lo, p),
            None => write!(f, "[{}, {})", self.lo, self.hi),
        }
    }
}

/// A finite union of spans kept sorted, disjoint and with adjacent spans merged,
/// so structural equality is set equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpanSet {
    spans: Vec<Span>,
}

impl SpanSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_spans(spans: impl IntoIterator<Item = Span>) -> Self {
        let mut s = SpanSet::new();
        for sp in spans {
            s.insert(sp);
        }
        s
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn insert(&mut self, sp: Span) {
        if sp.lo >= sp.hi {
            return;
        }
        self.spans.push(sp);
        self.spans.sort();
        let mut merged: Vec<Span> = Vec::with_capacity(self.spans.len());
        for sp in self.spans.drain(..) {
            match merged.last_mut() {
                Some(last) if sp.lo <= last.hi => {
                    if sp.hi > last.hi {
                        last.hi = sp.hi;
                    }
                }
                _ => merged.push(sp),
            }
        }
        self.spans = merged;
    }

    pub fn union(&self, other: &SpanSet) -> SpanSet {
        let mut s = self.clone();
        for sp in &other.spans {
            s.insert(sp.clone());
        }
        s
    }

    /// Removes the single point `a`.
    pub fn remove_point(&mut self, a: &Ordinal) {
        let mut out = Vec::with_capacity(self.spans.len() + 1);
        for sp in self.spans.drain(..) {
            if sp.contains(a) {
                out.push(Span::new(sp.lo.clone(), a.clone()));
                out.push(Span::new(a.succ(), sp.hi.clone()));
            } else {
                out.push(sp);
            }
        }
        self.spans = out.into_iter().filter(|s| s.lo < s.hi).collect();
    }

    pub fn contains(&self, a: &Ordinal) -> bool {
        self.span_of(a).is_some()
    }

    pub fn span_of(&self, a: &Ordinal) -> Option<&Span> {
        self.spans.iter().find(|s| s.contains(a))
    }

    /// Whether the closed range `[lo, hi]` lies inside the set.
    pub fn covers_closed(&self, lo: &Ordinal, hi: &Ordinal) -> bool {
        self.spans.iter().any(|s| &s.lo <= lo && hi < &s.hi)
    }
}

impl fmt::Display for SpanSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, s) in self.spans.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Desk-scale input data: `delta`, a block-index bound standing in for lambda,
/// the designated big-cofinality set, and the Big part of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UniverseSpec {
    pub delta: Ordinal,
    pub lambda: u32,
    pub big: BTreeSet<Ordinal>,
    pub f_big: SpanSet,
}

impl UniverseSpec {
    /// The reference universe: `delta = w^2*2`, lambda bound 3, big point `w^2`,
    /// `f` Big exactly on `[w, w^2]`.
    pub fn u_star() -> Self {
        UniverseSpec {
            delta: "w^2*2".parse().expect("literal"),
            lambda: 3,
            big: ["w^2".parse().expect("literal")].into_iter().collect(),
            f_big: SpanSet::from_spans([Span::closed(Ordinal::omega(), &"w^2".parse().expect("literal"))]),
        }
    }

    pub fn f_is_big(&self, a: &Ordinal) -> bool {
        self.f_big.contains(a)
    }

    /// Membership in the set of designated points where `f` is Big.
    pub fn in_l(&self, a: &Ordinal) -> bool {
        self.big.contains(a) && self.f_is_big(a)
    }

    pub fn l_set(&self) -> impl Iterator<Item = &Ordinal> {
        self.big.iter().filter(|b| self.f_is_big(b))
    }

    pub fn classify(&self, a: &Ordinal) -> Result<CofClass, UniverseError> {
        if a > &self.delta {
            return Err(UniverseError::OutOfUniverse(a.clone()));
        }
        if self.big.contains(a) {
            return Ok(CofClass::DesignatedBig);
        }
        Ok(a.structural_class())
    }

    /// Fundamental sequence restricted to omega-cofinal limits.
    pub fn fundamental_seq(&self, a: &Ordinal, n: u64) -> Result<Ordinal, UniverseError> {
        match self.classify(a)? {
            CofClass::LimOmega => Ok(a.fundamental(n)?),
            _ => Err(UniverseError::Ordinal(OrdinalError::NotOmegaLimit(a.clone()))),
        }
    }

    /// Block indices `zeta` with `0 < zeta < lambda`.
    pub fn zetas(&self) -> impl Iterator<Item = u32> {
        1..self.lambda.max(1)
    }

    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        r.check(self.delta.is_limit(), "delta-limit", || format!("delta = {} is not a limit", self.delta));
        r.check(self.lambda >= 1, "lambda-positive", || "lambda must be at least 1".into());
        for b in &self.big {
            r.check(b.is_limit(), "big-limit", || format!("{b} is not a limit ordinal"));
            r.check(b < &self.delta, "big-below-delta", || format!("{b} is not below delta"));
        }
        for sp in self.f_big.spans() {
            r.check(sp.hi <= self.delta, "f-within-delta", || format!("span {sp} exceeds delta"));
        }
        for b in self.l_set() {
            // the omega-2-closure consequence: a Big tail of f immediately below b
            let ok = self
                .f_big
                .span_of(b)
                .is_some_and(|sp| sp.lo < *b);
            r.check(ok, "omega2-closure", || format!("no a' < {b} with f Big on [a', {b})"));
        }
        r
    }
}

impl fmt::Display for UniverseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "lambda = {}", self.lambda)?;
        let big: Vec<String> = self.big.iter().map(|b| b.to_string()).collect();
        if big.is_empty() {
            writeln!(f, "big = {{}}")?;
        } else {
            writeln!(f, "big = {{ {} }}", big.join(", "))?;
        }
        writeln!(f, "f_big = {}", self.f_big)
    }
}

fn parse_span(text: &str) -> Result<Span, String> {
    let text = text.trim();
    let open = text.strip_prefix('[').ok_or("span must start with '['")?;
    let (body, closed) = if let Some(b) = open.strip_suffix(']') {
        (b, true)
    } else if let Some(b) = open.strip_suffix(')') {
        (b, false)
    } else {
        return Err("span must end with ']' or ')'".into());
    };
    let (lo, hi) = body.split_once(',').ok_or("span needs two endpoints")?;
    let lo: Ordinal = lo.trim().parse().map_err(|e: OrdinalError| e.to_string())?;
    let hi: Ordinal = hi.trim().parse().map_err(|e: OrdinalError| e.to_string())?;
    Ok(if closed { Span::closed(lo, &hi) } else { Span::new(lo, hi) })
}

/// Splits `a, b, [c, d), ...` on top-level commas.
fn split_top(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

impl FromStr for UniverseSpec {
    type Err = UniverseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut fields: BTreeMap<&str, (usize, String)> = BTreeMap::new();
        let mut f_big = SpanSet::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| UniverseError::Parse { line: i + 1, reason };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "delta" | "lambda" | "big" => {
                    fields.insert(if key == "delta" { "delta" } else if key == "lambda" { "lambda" } else { "big" }, (i + 1, value.to_string()));
                }
                "f_big" => {
                    let inner = value.trim();
                    if inner == "{}" {
                        continue;
                    }
                    for part in split_top(inner) {
                        f_big.insert(parse_span(&part).map_err(err)?);
                    }
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let get = |k: &str| {
            fields
                .get(k)
                .cloned()
                .ok_or(UniverseError::Parse { line: 0, reason: format!("missing key {k:?}") })
        };
        let (dl, dv) = get("delta")?;
        let delta: Ordinal = dv
            .parse()
            .map_err(|e: OrdinalError| UniverseError::Parse { line: dl, reason: e.to_string() })?;
        let (ll, lv) = get("lambda")?;
        let lambda: u32 = lv
            .parse()
            .map_err(|e: std::num::ParseIntError| UniverseError::Parse { line: ll, reason: e.to_string() })?;
        let mut big = BTreeSet::new();
        if let Some((bl, bv)) = fields.get("big") {
            let inner = bv
                .trim()
                .strip_prefix('{')
                .and_then(|b| b.strip_suffix('}'))
                .ok_or(UniverseError::Parse { line: *bl, reason: "big must be written { a, b, ... }".into() })?;
            for part in split_top(inner) {
                let o: Ordinal = part
                    .parse()
                    .map_err(|e: OrdinalError| UniverseError::Parse { line: *bl, reason: e.to_string() })?;
                big.insert(o);
            }
        }
        Ok(UniverseSpec { delta, lambda, big, f_big })
    }
}

/// The decomposition `f = f0 + f1` together with the `gamma` assignments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitResult {
    pub f0_big: SpanSet,
    pub f1_big: SpanSet,
    /// `beta -> gamma_beta` for every designated point where `f` is Big.
    pub gamma_of: BTreeMap<Ordinal, Ordinal>,
    /// Those `beta` with `gamma_beta < beta`.
    pub l_tilde: BTreeSet<Ordinal>,
}

impl SplitResult {
    pub fn gamma(&self, beta: &Ordinal) -> Option<&Ordinal> {
        self.gamma_of.get(beta)
    }

    /// The unique `beta` in `l_tilde` with `gamma_beta = g`.
    pub fn owner_of_gamma(&self, g: &Ordinal) -> Option<&Ordinal> {
        self.l_tilde.iter().find(|b| self.gamma_of.get(*b) == Some(g))
    }

    /// Checks the pointwise sum identity and the interval coding of `f1`.
    pub fn check_invariants(&self, u: &UniverseSpec) -> Report {
        let mut r = Report::new();
        let sum = self.f0_big.union(&self.f1_big);
        r.check(sum == u.f_big, "F1", || format!("f0 + f1 Big set {sum} differs from f Big set {}", u.f_big));
        let coded = SpanSet::from_spans(
            self.l_tilde.iter().map(|b| Span::closed(self.gamma_of[b].clone(), b)),
        );
        r.check(coded == self.f1_big, "f1-coding", || format!("f1 Big set {} is not {}", self.f1_big, coded));
        for b in &u.big {
            r.check(!self.f0_big.contains(b), "f0-small-at-big", || format!("f0 is Big at {b}"));
        }
        let lt: Vec<&Ordinal> = self.l_tilde.iter().collect();
        for (i, a) in lt.iter().enumerate() {
            for b in &lt[i + 1..] {
                let (ga, gb) = (&self.gamma_of[*a], &self.gamma_of[*b]);
                let disjoint = *a < gb || *b < ga;
                r.check(disjoint, "gamma-intervals-disjoint", || format!("[{ga}, {a}] meets [{gb}, {b}]"));
            }
        }
        r
    }
}

/// Computes `f0`, `f1`, the `gamma_beta` and the set of `beta` with `gamma_beta < beta`.
pub fn split_f(u: &UniverseSpec, t: &IntervalTree) -> Result<SplitResult, UniverseError> {
    if t.universe() != u {
        return Err(UniverseError::TreeMismatch);
    }
    let mut f0 = u.f_big.clone();
    for b in &u.big {
        f0.remove_point(b);
    }
    let mut gamma_of = BTreeMap::new();
    let mut l_tilde = BTreeSet::new();
    for b in u.l_set() {
        let j = t.j_interval(b).map_err(Box::new)?;
        let g = t.gamma(&j).map_err(Box::new)?;
        if &g < b {
            l_tilde.insert(b.clone());
        }
        gamma_of.insert(b.clone(), g);
    }
    let f1 = SpanSet::from_spans(l_tilde.iter().map(|b| Span::closed(gamma_of[b].clone(), b)));
    Ok(SplitResult { f0_big: f0, f1_big: f1, gamma_of, l_tilde })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;

    #[test]
    fn u_star_is_valid() {
        assert!(UniverseSpec::u_star().validate().is_ok());
    }

    #[test]
    fn closure_violation_without_big_tail() {
        let mut u = UniverseSpec::u_star();
        u.f_big = SpanSet::from_spans([Span::closed(ord("w"), &ord("w*2"))]);
        // f is Small at w^2 now, so w^2 is not in L and nothing is violated
        assert!(u.validate().is_ok());
        // with f Big at w^2 alone there is no Big tail below it
        u.f_big.insert(Span::closed(ord("w^2"), &ord("w^2")));
        let r = u.validate();
        assert!(r.has_rule("omega2-closure"), "{r}");
    }

    #[test]
    fn non_limit_big_point_rejected() {
        let mut u = UniverseSpec::u_star();
        u.big.insert(ord("w+1"));
        assert!(u.validate().has_rule("big-limit"));
    }

    #[test]
    fn classify_examples() {
        let u = UniverseSpec::u_star();
        assert_eq!(u.classify(&ord("0")).unwrap(), CofClass::Zero);
        assert_eq!(u.classify(&ord("w+1")).unwrap(), CofClass::Successor);
        assert_eq!(u.classify(&ord("w^2")).unwrap(), CofClass::DesignatedBig);
        assert_eq!(u.classify(&ord("w")).unwrap(), CofClass::LimOmega);
        assert!(matches!(u.classify(&ord("w^3")), Err(UniverseError::OutOfUniverse(_))));
        assert!(u.fundamental_seq(&ord("w^2"), 1).is_err());
        assert_eq!(u.fundamental_seq(&ord("w*2"), 2).unwrap(), ord("w+2"));
    }

    #[test]
    fn text_round_trip() {
        let u = UniverseSpec::u_star();
        let text = u.to_string();
        assert_eq!(text, "delta = w^2*2\nlambda = 3\nbig = { w^2 }\nf_big = [w, w^2]\n");
        let back: UniverseSpec = text.parse().unwrap();
        assert_eq!(back, u);
        let with_open: UniverseSpec = "delta = w^3\nlambda = 2\nbig = {}\nf_big = [w, w^2), [w^2 + 1, w^2*2]\n".parse().unwrap();
        assert_eq!(with_open.f_big.spans().len(), 2);
        assert!("delta = w\nlambda = x\n".parse::<UniverseSpec>().is_err());
        assert!("lambda = 2\n".parse::<UniverseSpec>().is_err());
    }

    #[test]
    fn span_set_merges_adjacent() {
        let s = SpanSet::from_spans([Span::new(ord("w"), ord("w*2")), Span::new(ord("w*2"), ord("w*3"))]);
        assert_eq!(s.spans().len(), 1);
        let mut t = s.clone();
        t.remove_point(&ord("w*2"));
        assert_eq!(t.spans().len(), 2);
        assert!(!t.contains(&ord("w*2")));
        assert!(t.contains(&ord("w*2+1")));
    }
}
