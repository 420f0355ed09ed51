use cardseq::ordinal::Ordinal;
use cardseq::sample;
use cardseq::tree::IntervalTree;
use cardseq::universe::{split_f, UniverseSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn universe(seed: u64) -> UniverseSpec {
    sample::universe(&mut ChaCha8Rng::seed_from_u64(seed), 2)
}

fn point(seed: u64, u: &UniverseSpec) -> Ordinal {
    sample::ordinal_below(&mut ChaCha8Rng::seed_from_u64(seed), &u.delta, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_universes_validate_and_split(seed in any::<u64>()) {
        let u = universe(seed);
        prop_assert!(u.validate().is_ok());
        let t = IntervalTree::new(u.clone());
        let s = split_f(&u, &t).unwrap();
        let r = s.check_invariants(&u);
        prop_assert!(r.is_ok(), "{}", r);
        let star = t.check_star(&s).unwrap();
        prop_assert!(star.is_ok(), "{}", star);
    }

    #[test]
    fn located_intervals_shrink(seed in any::<u64>(), at in any::<u64>()) {
        let u = universe(seed);
        let t = IntervalTree::new(u.clone());
        let a = point(at, &u);
        prop_assert_eq!(t.locate(&a, 0).unwrap(), t.root());
        let l = t.first_level(&a).unwrap();
        let path = t.path(&a, l + 2).unwrap();
        for w in path.windows(2) {
            prop_assert!(w[1].is_subset_of(&w[0]));
            prop_assert!(w[1].contains(&a));
        }
        prop_assert_eq!(&path[l].lo, &a);
        if l > 0 {
            prop_assert!(path[l - 1].lo != a);
            let j = t.j_interval(&a).unwrap();
            prop_assert_eq!(&j.hi, &a);
            prop_assert!(j.is_subset_of(&path[l - 1]));
        }
    }

    #[test]
    fn e_sequences_are_stable_and_increasing(seed in any::<u64>(), at in any::<u64>(), depth in 0usize..4) {
        let u = universe(seed);
        let t = IntervalTree::new(u.clone());
        let a = point(at, &u);
        let i = t.locate(&a, depth).unwrap();
        let first = t.e_seq(&i).unwrap().prefix(8);
        prop_assert_eq!(&first, &t.e_seq(&i).unwrap().prefix(8));
        prop_assert_eq!(&first[0], &i.lo);
        prop_assert!(first.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(first.iter().all(|x| i.contains(x)));
        let fresh = IntervalTree::new(u);
        prop_assert_eq!(first, fresh.e_seq(&i).unwrap().prefix(8));
    }
}

#[test]
fn reference_universe_split() {
    let u = UniverseSpec::u_star();
    let t = IntervalTree::new(u.clone());
    let s = split_f(&u, &t).unwrap();
    let w2: Ordinal = "w^2".parse().unwrap();
    assert_eq!(s.l_tilde.iter().collect::<Vec<_>>(), vec![&w2]);
    assert_eq!(s.gamma_of[&w2], Ordinal::omega());
    assert_eq!(t.first_level(&Ordinal::omega()).unwrap(), t.first_level(&w2).unwrap() + 1);
}
