use std::collections::BTreeSet;

use cardseq::forcing::gen;
use cardseq::ordinal::Ordinal;
use cardseq::poset::cb::{symbolic_cb, ReplicatedPoset};
use cardseq::poset::tower::transform_blocks;
use cardseq::poset::{validate_poset, LcsPoset, PPoint, Supply};
use cardseq::sample;
use cardseq::tree::IntervalTree;
use cardseq::universe::split_f;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn transformed(useed: u64, seed: u64, steps: usize) -> LcsPoset {
    let u = sample::universe(&mut ChaCha8Rng::seed_from_u64(useed), 2);
    let t = IntervalTree::new(u.clone());
    let s = split_f(&u, &t).unwrap();
    let c = gen::condition(&mut ChaCha8Rng::seed_from_u64(seed), &u, &t, &s, steps);
    transform_blocks(&u, &t, &s, &c).unwrap()
}

/// Drops one element from one non-empty infimum.
fn corrupt(p: &mut LcsPoset, rng: &mut ChaCha8Rng) {
    let pts: Vec<PPoint> = p.points().iter().cloned().collect();
    let mut entries = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            if !p.inf(a, b).is_empty() {
                entries.push((a.clone(), b.clone()));
            }
        }
    }
    if entries.is_empty() {
        return;
    }
    let (a, b) = entries[rng.gen_range(0..entries.len())].clone();
    let mut v = p.inf(&a, &b);
    let x = v.iter().nth(rng.gen_range(0..v.len())).cloned().expect("non-empty");
    v.remove(&x);
    p.set_inf(&a, &b, v);
}

/// Every class on level `k > 0` sits over some class on level `k - 1`.
fn layered(rng: &mut ChaCha8Rng, supply: impl Fn(&mut ChaCha8Rng) -> Supply) -> (ReplicatedPoset, Vec<usize>) {
    let bound = Ordinal::omega_pow(Ordinal::nat(3));
    let mut levels = BTreeSet::new();
    let want = rng.gen_range(1..=5);
    while levels.len() < want {
        levels.insert(sample::ordinal_below(rng, &bound, 3));
    }
    let mut p = ReplicatedPoset::new();
    let mut idx = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for (k, lv) in levels.into_iter().enumerate() {
        let mut here = Vec::new();
        for c in 0..rng.gen_range(1..=3) {
            let s = supply(rng);
            let id = p.add(format!("L{k}c{c}"), lv.clone(), s);
            if !prev.is_empty() {
                p.edge(prev[rng.gen_range(0..prev.len())], id);
            }
            idx.push(k);
            here.push(id);
        }
        prev = here;
    }
    (p, idx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn accepted_infima_dominate_common_lower_bounds(useed in 0u64..8, seed in any::<u64>(), steps in 0usize..8, broken in any::<bool>()) {
        let mut p = transformed(useed, seed, steps);
        let r = validate_poset(&p);
        prop_assert!(r.is_ok(), "{}", r);
        if broken {
            corrupt(&mut p, &mut ChaCha8Rng::seed_from_u64(seed));
        }
        if validate_poset(&p).is_ok() {
            let pts: Vec<&PPoint> = p.points().iter().collect();
            for a in &pts {
                for b in &pts {
                    if a == b {
                        continue;
                    }
                    let v = p.inf(a, b);
                    prop_assert!(v.iter().all(|x| p.leq(x, a) && p.leq(x, b)));
                    for w in pts.iter().filter(|w| p.leq(w, a) && p.leq(w, b)) {
                        prop_assert!(v.iter().any(|x| p.leq(w, x)));
                    }
                }
            }
        }
    }

    #[test]
    fn full_supply_ranks_by_level_index(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, idx) = layered(&mut rng, |_| Supply::Omega);
        prop_assert_eq!(symbolic_cb(&p).rank, idx);
    }

    #[test]
    fn more_supply_never_lowers_a_rank(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut p, _) = layered(&mut rng, |r| Supply::Finite(r.gen_range(1..3)));
        let mut before = symbolic_cb(&p).rank;
        for _ in 0..p.classes.len() {
            let i = rng.gen_range(0..p.classes.len());
            p.classes[i].supply = match p.classes[i].supply {
                Supply::Finite(n) if rng.gen_bool(0.5) => Supply::Finite(n + 1),
                _ => Supply::Omega,
            };
            let after = symbolic_cb(&p).rank;
            prop_assert!(before.iter().zip(&after).all(|(a, b)| a <= b), "{:?} -> {:?}", before, after);
            before = after;
        }
    }
}
