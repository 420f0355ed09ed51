//! Pair functions on ordinals: adequacy of finite families, the per-interval
//! functions `G_I` (intersection rule), the global `G`, and the forcing helper `h`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forcing::point::Point;
use crate::ordinal::Ordinal;
use crate::tree::{ESeq, IntervalTree};
use crate::walks::{separation, WalkError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("F{{{a}, {b}}} contains {x}, which is not below min({a}, {b})")]
    DomainError { a: Ordinal, b: Ordinal, x: Ordinal },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdequacyViolation {
    /// Indices of the two family members.
    pub pair: (usize, usize),
    pub clause: u8,
    pub alpha: Ordinal,
    pub beta: Ordinal,
    pub tau: Ordinal,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdequacyReport {
    pub pass: bool,
    pub violations: Vec<AdequacyViolation>,
}

/// `E(I) ∩ min(a, b)` on elements of `E(I)`.
pub fn intersection_rule(e: &BTreeSet<Ordinal>) -> impl Fn(&Ordinal, &Ordinal) -> BTreeSet<Ordinal> + '_ {
    move |a, b| {
        let m = std::cmp::min(a, b);
        e.range(..m.clone()).cloned().collect()
    }
}

/// Checks the three adequacy clauses for every pair of family members, every
/// `alpha in a \ b`, `beta in b \ a`, `tau in a ∩ b`.
pub fn adequacy_check<F>(family: &[BTreeSet<Ordinal>], f: F) -> Result<AdequacyReport, DeltaError>
where
    F: Fn(&Ordinal, &Ordinal) -> BTreeSet<Ordinal>,
{
    let eval = |x: &Ordinal, y: &Ordinal| -> Result<BTreeSet<Ordinal>, DeltaError> {
        let v = f(x, y);
        let m = std::cmp::min(x, y);
        if let Some(bad) = v.iter().find(|z| *z >= m) {
            return Err(DeltaError::DomainError { a: x.clone(), b: y.clone(), x: bad.clone() });
        }
        Ok(v)
    };
    let mut violations = Vec::new();
    for i in 0..family.len() {
        for j in 0..family.len() {
            if i == j {
                continue;
            }
            let (a, b) = (&family[i], &family[j]);
            for al in a.difference(b) {
                for be in b.difference(a) {
                    let fab = eval(al, be)?;
                    for tau in a.intersection(b) {
                        let mut push = |clause| {
                            violations.push(AdequacyViolation {
                                pair: (i, j),
                                clause,
                                alpha: al.clone(),
                                beta: be.clone(),
                                tau: tau.clone(),
                            })
                        };
                        if tau < al && tau < be && !fab.contains(tau) {
                            push(1);
                        }
                        if tau < be && !eval(al, tau)?.is_subset(&fab) {
                            push(2);
                        }
                        if tau < al && !eval(be, tau)?.is_subset(&fab) {
                            push(3);
                        }
                    }
                }
            }
        }
    }
    Ok(AdequacyReport { pass: violations.is_empty(), violations })
}

/// A possibly infinite set of ordinals with decidable membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LazySet {
    Finite(BTreeSet<Ordinal>),
    /// All of `E(I)` for some tree interval.
    ESet(ESeq),
}

impl LazySet {
    pub fn empty() -> Self {
        LazySet::Finite(BTreeSet::new())
    }

    pub fn contains(&self, x: &Ordinal) -> bool {
        match self {
            LazySet::Finite(s) => s.contains(x),
            LazySet::ESet(e) => e.contains(x),
        }
    }

    /// Elements below `bound`, at most `cap` of them, in increasing order.
    pub fn elements_below(&self, bound: &Ordinal, cap: usize) -> Vec<Ordinal> {
        match self {
            LazySet::Finite(s) => s.range(..bound.clone()).take(cap).cloned().collect(),
            LazySet::ESet(e) => e.elements_below(bound, cap),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            LazySet::Finite(_) => true,
            LazySet::ESet(e) => e.is_finite(),
        }
    }
}

/// `G{a, b} = G_I{J-, K-} ∪ {I-}` where `I` is the separating interval, with the
/// intersection rule `G_I{x, y} = E(I) ∩ x ∩ y` used at every interval.
pub fn g_pair(t: &IntervalTree, a: &Ordinal, b: &Ordinal) -> Result<BTreeSet<Ordinal>, WalkError> {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let sep = separation(t, a, b)?;
    let e = t.e_seq(&sep.i)?;
    let m = std::cmp::min(&sep.j.lo, &sep.kk.lo);
    let mut out: BTreeSet<Ordinal> = e.elements_below(m, usize::MAX).into_iter().collect();
    out.insert(sep.i.lo.clone());
    Ok(out)
}

/// `h{s, t}`: `G` of the lower projections when they differ, `E(J(pi_-))` when
/// they agree but the blocks differ, and empty otherwise.
pub fn h_pair(t: &IntervalTree, s1: &Point, s2: &Point) -> Result<LazySet, WalkError> {
    let (m1, m2) = (s1.pi_minus(), s2.pi_minus());
    if m1 != m2 {
        return Ok(LazySet::Finite(g_pair(t, &m1, &m2)?));
    }
    if s1.block_id() != s2.block_id() {
        let j = t.j_interval(&m1)?;
        return Ok(LazySet::ESet(t.e_seq(&j)?));
    }
    Ok(LazySet::empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use crate::universe::{split_f, UniverseSpec};

    fn set(xs: &[&str]) -> BTreeSet<Ordinal> {
        xs.iter().map(|x| ord(x)).collect()
    }

    #[test]
    fn adequacy_examples() {
        let t = IntervalTree::new(UniverseSpec::u_star());
        let e: BTreeSet<Ordinal> = t.e_seq(&t.locate(&ord("0"), 2).unwrap()).unwrap().prefix(6).into_iter().collect();
        let fam = vec![set(&["0", "w"]), set(&["0", "w+2"])];
        assert!(adequacy_check(&fam, intersection_rule(&e)).unwrap().pass);
        assert!(adequacy_check(&fam[..1], |_, _| BTreeSet::new()).unwrap().pass);
        let r = adequacy_check(&fam, |_, _| BTreeSet::new()).unwrap();
        assert!(!r.pass && r.violations.iter().any(|v| v.clause == 1 && v.tau == ord("0")));
        let bad = adequacy_check(&fam, |a, _| [a.clone()].into_iter().collect());
        assert!(matches!(bad, Err(DeltaError::DomainError { .. })));
    }

    #[test]
    fn g_examples() {
        let t = IntervalTree::new(UniverseSpec::u_star());
        assert_eq!(g_pair(&t, &ord("0"), &ord("w")).unwrap(), set(&["0"]));
        assert_eq!(g_pair(&t, &ord("w+2"), &ord("w*2+1")).unwrap(), set(&["0", "w"]));
        // separation at the root: E(root) ∩ w^2 = {0}
        assert_eq!(g_pair(&t, &ord("w^2"), &ord("w^2+1")).unwrap(), set(&["0"]));
    }

    #[test]
    fn h_examples() {
        let u = UniverseSpec::u_star();
        let t = IntervalTree::new(u.clone());
        let s = split_f(&u, &t).unwrap();
        let b1 = Point::block(&s, &ord("w^2"), 1, 0);
        let b2 = Point::block(&s, &ord("w^2"), 2, 0);
        let h = h_pair(&t, &b1, &b2).unwrap();
        assert_eq!(h, LazySet::ESet(t.e_seq(&t.j_interval(&ord("w")).unwrap()).unwrap()));
        assert!(h.contains(&ord("7")) && !h.is_finite());
        let p = Point::unit(ord("5"), 0);
        let q = Point::unit(ord("5"), 1);
        assert_eq!(h_pair(&t, &p, &q).unwrap(), LazySet::empty());
        let z = Point::unit(ord("0"), 0);
        assert_eq!(h_pair(&t, &z, &b1).unwrap(), LazySet::Finite(set(&["0"])));
        assert_eq!(h_pair(&t, &b1, &z).unwrap(), h_pair(&t, &z, &b1).unwrap());
    }
}
