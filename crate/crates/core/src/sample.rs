//! Seeded random ordinals and universes for property suites.

use std::collections::BTreeSet;

use rand::Rng;

use crate::ordinal::{Ordinal, Term};
use crate::tree::IntervalTree;
use crate::universe::{split_f, Span, SpanSet, UniverseSpec};

/// A random ordinal strictly below `bound` with coefficients at most `max_coef`.
///
/// Keeps a random prefix of `bound`'s normal form, lowers the next coefficient,
/// and appends a random tail of smaller exponents.
pub fn ordinal_below<R: Rng + ?Sized>(rng: &mut R, bound: &Ordinal, max_coef: u64) -> Ordinal {
    let bt = bound.terms();
    if bt.is_empty() {
        return Ordinal::zero();
    }
    let i = rng.gen_range(0..bt.len());
    let mut terms: Vec<Term> = bt[..i].to_vec();
    let c = rng.gen_range(0..bt[i].coef);
    if c > 0 {
        terms.push(Term { exp: bt[i].exp.clone(), coef: c });
    }
    let top = bt[i].exp.as_nat().unwrap_or(3);
    let mut e = top;
    while e > 0 {
        e = rng.gen_range(0..e);
        if rng.gen_bool(0.3) {
            break;
        }
        terms.push(Term { exp: Ordinal::nat(e), coef: rng.gen_range(1..=max_coef.max(1)) });
    }
    Ordinal::from_terms(terms).expect("decreasing exponents")
}

/// Random limit ordinal in `(lo, hi)` if one is found quickly.
fn limit_between<R: Rng + ?Sized>(rng: &mut R, lo: &Ordinal, hi: &Ordinal) -> Option<Ordinal> {
    for _ in 0..64 {
        let x = ordinal_below(rng, hi, 3);
        let x = x.limit_part();
        if &x > lo && &x < hi && x.is_limit() {
            return Some(x);
        }
    }
    None
}

/// A random universe that passes validation and leaves room for every `gamma`,
/// so that the split of `f` exists. Candidates failing either test are redrawn.
pub fn universe<R: Rng + ?Sized>(rng: &mut R, max_big: usize) -> UniverseSpec {
    loop {
        let u = candidate_universe(rng, max_big);
        if !u.validate().is_ok() {
            continue;
        }
        let t = IntervalTree::new(u.clone());
        if split_f(&u, &t).is_ok() {
            return u;
        }
    }
}

/// Heights are drawn from `w^2`, `w^2*2`, `w^3`, `w^3 + w*2`, `w^3*2`; each
/// big point gets a Big span starting at a limit below it.
fn candidate_universe<R: Rng + ?Sized>(rng: &mut R, max_big: usize) -> UniverseSpec {
    let heights = ["w^2", "w^2*2", "w^3", "w^3 + w*2", "w^3*2"];
    let delta: Ordinal = heights[rng.gen_range(0..heights.len())].parse().expect("literal");
    let lambda = rng.gen_range(2..=3);
    let want = rng.gen_range(0..=max_big);
    let mut big = BTreeSet::new();
    let mut f_big = SpanSet::new();
    let omega = Ordinal::omega();
    for _ in 0..want {
        let Some(b) = limit_between(rng, &omega.add(&omega), &delta) else { continue };
        // a non-trivial limit with at least one limit strictly below its Big tail
        let Some(start) = limit_between(rng, &Ordinal::zero(), &b) else { continue };
        big.insert(b.clone());
        if rng.gen_bool(0.85) {
            f_big.insert(Span::closed(start, &b));
        }
    }
    if rng.gen_bool(0.3) {
        let a = ordinal_below(rng, &delta, 3);
        let b = ordinal_below(rng, &delta, 3);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        // extra Big stretches must not create a Big big-point without a tail
        let extra = Span::new(a, b);
        if !big.iter().any(|x| extra.contains(x) || extra.hi == *x) {
            f_big.insert(extra);
        }
    }
    UniverseSpec { delta, lambda, big, f_big }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_stay_below_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bound: Ordinal = "w^3 + w*2".parse().unwrap();
        for _ in 0..500 {
            assert!(ordinal_below(&mut rng, &bound, 4) < bound);
        }
    }

    #[test]
    fn random_universes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let u = universe(&mut rng, 2);
            assert!(u.validate().is_ok(), "{u}\n{}", u.validate());
        }
    }
}
