use cardseq::chain::{canonical_levels, predecessors, run_chain, Schedule};
use cardseq::forcing::gen::Request;
use cardseq::forcing::point::Point;
use cardseq::ordinal::Ordinal;
use cardseq::tree::IntervalTree;
use cardseq::universe::{split_f, UniverseSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn saturation_is_deterministic_and_monotone(seed in any::<u64>(), steps in 4usize..24) {
        let u = UniverseSpec::u_star();
        let t = IntervalTree::new(u.clone());
        let s = split_f(&u, &t).unwrap();
        let sched = Schedule::Saturation { steps, seed };
        let a = run_chain(&u, &t, &s, &sched, 3, &[]).unwrap();
        let b = run_chain(&u, &t, &s, &sched, 3, &[]).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for g in &a.growth {
            prop_assert!(g.counts.windows(2).all(|w| w[0] <= w[1]));
        }
        prop_assert!(a.checkpoints.windows(2).all(|w| w[0].points <= w[1].points));
    }

    #[test]
    fn repeated_extensions_at_zero_accumulate(level in 0usize..12, n in 1u32..5) {
        let u = UniverseSpec::u_star();
        let t = IntervalTree::new(u.clone());
        let s = split_f(&u, &t).unwrap();
        let lv: Vec<Ordinal> = canonical_levels(&u.delta).into_iter().filter(|x| !x.is_zero()).collect();
        let tgt = Point::unit(lv[level % lv.len()].clone(), 0);
        let mut reqs = vec![Request::AddPoint(tgt.clone())];
        reqs.extend((0..n).map(|j| Request::ExtendBelow { tgt: tgt.clone(), alpha: Ordinal::zero(), j }));
        let tracked = [(tgt.clone(), Ordinal::zero())];
        let r = run_chain(&u, &t, &s, &Schedule::Fixed(reqs), 2, &tracked).unwrap();
        prop_assert!(predecessors(&r.final_condition, &tgt, &Ordinal::zero()) >= n as usize);
        prop_assert_eq!(r.growth[0].last(), predecessors(&r.final_condition, &tgt, &Ordinal::zero()));
    }
}
