//! Separation levels and walks between ordinals through the interval tree.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::report::Report;
use crate::tree::{Interval, IntervalTree, TreeError, MAX_DEPTH};
use crate::universe::SplitResult;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("walk endpoints must be distinct, got {0} twice")]
    EqualArguments(Ordinal),
    #[error("walk endpoints must be increasing, got {0} > {1}")]
    Decreasing(Ordinal, Ordinal),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Where `a < b` separate: `I = I(a,k) = I(b,k)`, `J = I(a,k+1)`, `K = I(b,k+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub k: usize,
    pub i: Interval,
    pub j: Interval,
    pub kk: Interval,
}

pub fn separation(t: &IntervalTree, a: &Ordinal, b: &Ordinal) -> Result<Separation, WalkError> {
    if a == b {
        return Err(WalkError::EqualArguments(a.clone()));
    }
    if a > b {
        return Err(WalkError::Decreasing(a.clone(), b.clone()));
    }
    for n in 0..MAX_DEPTH {
        let pa = t.path(a, n + 1)?;
        let pb = t.path(b, n + 1)?;
        if pa[n + 1] != pb[n + 1] {
            return Ok(Separation { k: n, i: pa[n].clone(), j: pa[n + 1].clone(), kk: pb[n + 1].clone() });
        }
    }
    Err(TreeError::DepthExceeded(a.clone()).into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub seq: Vec<Ordinal>,
}

impl Walk {
    pub fn contains(&self, x: &Ordinal) -> bool {
        self.seq.contains(x)
    }

    /// The sequence with adjacent repeats merged; for display only.
    pub fn collapsed(&self) -> Vec<Ordinal> {
        let mut out: Vec<Ordinal> = Vec::with_capacity(self.seq.len());
        for x in &self.seq {
            if out.last() != Some(x) {
                out.push(x.clone());
            }
        }
        out
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.seq.iter().map(|x| x.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// `w(a, b)` for `a < b < delta`, repeats kept.
pub fn walk(t: &IntervalTree, a: &Ordinal, b: &Ordinal) -> Result<Walk, WalkError> {
    let sep = separation(t, a, b)?;
    let k = sep.k;
    let la = t.first_level(a)?;
    let lb = t.first_level(b)?;
    let mut seq = vec![a.clone()];
    let pa = t.path(a, la.max(k + 1))?;
    if la <= k + 1 {
        seq.push(pa[k + 1].hi.clone());
    } else {
        for n in (k + 1..=la).rev() {
            seq.push(pa[n].hi.clone());
        }
    }
    if lb > k + 1 {
        let pb = t.path(b, lb - 1)?;
        for i in &pb[k + 1..lb] {
            seq.push(i.lo.clone());
        }
    }
    seq.push(b.clone());
    Ok(Walk { seq })
}

/// Endpoints, range `[a, b]`, weak monotonicity after the first entry, and the
/// provenance of each entry as some `I(a,n)+` or `I(b,n)-`.
pub fn check_walk_shape(t: &IntervalTree, a: &Ordinal, b: &Ordinal) -> Result<Report, WalkError> {
    let w = walk(t, a, b)?;
    let mut r = Report::new();
    let s = &w.seq;
    r.check(s.first() == Some(a) && s.last() == Some(b), "walk-endpoints", || format!("w({a},{b}) = {w}"));
    for x in s {
        r.check(a <= x && x <= b, "walk-range", || format!("{x} in w({a},{b}) outside [{a}, {b}]"));
    }
    for p in s[1..].windows(2) {
        r.check(p[0] <= p[1], "walk-monotone", || format!("w({a},{b}) = {w} decreases at {}", p[1]));
    }
    let top = t.first_level(a)?.max(t.first_level(b)?);
    let pa = t.path(a, top)?;
    let pb = t.path(b, top)?;
    for x in &s[1..] {
        let ok = pa.iter().any(|i| &i.hi == x) || pb.iter().any(|i| &i.lo == x);
        r.check(ok, "walk-provenance", || format!("{x} in w({a},{b}) is no tree endpoint along a or b"));
    }
    Ok(r)
}

/// For `b` with `gamma_b < b` and sampled `a < gamma_b`: `gamma_b` lies on `w(a, gamma_b + 1)`.
pub fn check_gamma_visit(t: &IntervalTree, s: &SplitResult, alphas: &[Ordinal]) -> Result<(Report, usize), WalkError> {
    let mut r = Report::new();
    let mut n = 0;
    for b in &s.l_tilde {
        let g = &s.gamma_of[b];
        for a in alphas.iter().filter(|a| *a < g) {
            n += 1;
            let w = walk(t, a, &g.succ())?;
            r.check(w.contains(g), "gamma-visit", || format!("beta {b}: {g} missing from w({a}, {}) = {w}", g.succ()));
        }
    }
    Ok((r, n))
}

/// For `b` with `gamma_b < b`, `I = J(gamma_b)` and sampled `a` in `I` other than
/// `I-`: the first element of `E(I)` above `a` lies on both `w(a, gamma_b)` and
/// `w(a, gamma_b + 1)`.
///
/// At `a = I-` the walk jumps straight to `I+ = gamma_b` and the statement fails;
/// see [`e_step_fails_at_left_end`].
pub fn check_e_step(t: &IntervalTree, s: &SplitResult, alphas: &[Ordinal]) -> Result<(Report, usize), WalkError> {
    let mut r = Report::new();
    let mut n = 0;
    for b in &s.l_tilde {
        let g = &s.gamma_of[b];
        let i = t.j_interval(g)?;
        let e = t.e_seq(&i)?;
        for a in alphas.iter().filter(|a| i.contains(a) && **a != i.lo) {
            n += 1;
            let eps = e.get(e.index_at_or_below(a) + 1).expect("omega-type E");
            let w1 = walk(t, a, g)?;
            r.check(w1.contains(&eps), "e-step-to-gamma", || format!("beta {b}: {eps} missing from w({a}, {g}) = {w1}"));
            let w2 = walk(t, a, &g.succ())?;
            r.check(w2.contains(&eps), "e-step-past-gamma", || format!("beta {b}: {eps} missing from w({a}, {}) = {w2}", g.succ()));
        }
    }
    Ok((r, n))
}

/// Whether the E-step statement fails at `a = J(gamma_b)-`, for every `b` with
/// `gamma_b < b`. Returns the number of such `b`.
pub fn e_step_fails_at_left_end(t: &IntervalTree, s: &SplitResult) -> Result<(bool, usize), WalkError> {
    let mut all_fail = true;
    for b in &s.l_tilde {
        let g = &s.gamma_of[b];
        let i = t.j_interval(g)?;
        let e = t.e_seq(&i)?;
        let eps = e.get(1).expect("omega-type E");
        all_fail &= !walk(t, &i.lo, g)?.contains(&eps) && !walk(t, &i.lo, &g.succ())?.contains(&eps);
    }
    Ok((all_fail, s.l_tilde.len()))
}

/// For `b` with `gamma_b < b` and sampled `a < J(b)-`: `gamma_b` is not on `w(a, b)`.
pub fn check_gamma_absent(t: &IntervalTree, s: &SplitResult, alphas: &[Ordinal]) -> Result<(Report, usize), WalkError> {
    let mut r = Report::new();
    let mut n = 0;
    for b in &s.l_tilde {
        let g = &s.gamma_of[b];
        let jb = t.j_interval(b)?;
        for a in alphas.iter().filter(|a| *a < &jb.lo) {
            n += 1;
            let w = walk(t, a, b)?;
            r.check(!w.contains(g), "gamma-absent", || format!("{g} appears in w({a}, {b}) = {w}"));
        }
    }
    Ok((r, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use crate::universe::{split_f, UniverseSpec};

    fn seq(xs: &[&str]) -> Vec<Ordinal> {
        xs.iter().map(|x| ord(x)).collect()
    }

    #[test]
    fn separation_examples() {
        let t = IntervalTree::new(UniverseSpec::u_star());
        let s = separation(&t, &ord("0"), &ord("w+1")).unwrap();
        assert_eq!((s.k, s.i.to_string(), s.j.to_string(), s.kk.to_string()), (2, "[0, w^2)".into(), "[0, w)".into(), "[w, w + 2)".into()));
        // w^2 + 1 already leaves [0, w^2 + 1) at level 1
        let s = separation(&t, &ord("w^2"), &ord("w^2+1")).unwrap();
        assert_eq!((s.k, s.j.to_string(), s.kk.to_string()), (0, "[0, w^2 + 1)".into(), "[w^2 + 1, w^2 + w + 1)".into()));
        assert_eq!(separation(&t, &ord("0"), &ord("1")).unwrap().k, 3);
        assert!(matches!(separation(&t, &ord("w"), &ord("w")), Err(WalkError::EqualArguments(_))));
    }

    #[test]
    fn walk_examples() {
        let t = IntervalTree::new(UniverseSpec::u_star());
        assert_eq!(walk(&t, &ord("0"), &ord("w+1")).unwrap().seq, seq(&["0", "w", "w", "w+1"]));
        // l(w^2) = 2 > k + 1 = 1, so the walk climbs a_2, a_1 before reaching b
        assert_eq!(walk(&t, &ord("w^2"), &ord("w^2+1")).unwrap().seq, seq(&["w^2", "w^2+1", "w^2+1", "w^2+1"]));
        assert_eq!(walk(&t, &ord("5"), &ord("w")).unwrap().seq, seq(&["5", "6", "w", "w"]));
        assert!(walk(&t, &ord("0"), &ord("w+1")).unwrap().contains(&ord("w")));
        assert_eq!(walk(&t, &ord("0"), &ord("w+1")).unwrap().collapsed(), seq(&["0", "w", "w+1"]));
    }

    #[test]
    fn proposition_suites_on_u_star() {
        let t = IntervalTree::new(UniverseSpec::u_star());
        let s = split_f(t.universe(), &t).unwrap();
        let alphas = seq(&["0", "1", "5", "17"]);
        let (r, n) = check_gamma_visit(&t, &s, &alphas).unwrap();
        assert!(r.is_ok() && n == 4, "{r}");
        let (r, n) = check_e_step(&t, &s, &alphas).unwrap();
        assert!(r.is_ok() && n == 3, "{r}");
        // w(0, w) = <0, w, w> misses the first E-element 1 of J(w) = [0, w)
        assert_eq!(e_step_fails_at_left_end(&t, &s).unwrap(), (true, 1));
        // J(w^2) starts at 0, so nothing lies below it
        let (r, n) = check_gamma_absent(&t, &s, &alphas).unwrap();
        assert!(r.is_ok() && n == 0);
        for b in ["1", "w", "w+1", "w*3+2", "w^2", "w^2+w+1"] {
            let r = check_walk_shape(&t, &ord("0"), &ord(b)).unwrap();
            assert!(r.is_ok(), "{r}");
        }
    }
}
