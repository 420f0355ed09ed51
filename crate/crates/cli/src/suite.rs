//! Property suites behind `cardseq suite NAME`.

use std::collections::BTreeSet;

use cardseq::chain::{canonical_levels, run_chain, Schedule};
use cardseq::delta::{adequacy_check, intersection_rule};
use cardseq::forcing::condition::{validate, Condition};
use cardseq::forcing::gen;
use cardseq::forcing::point::Point;
use cardseq::ordinal::Ordinal;
use cardseq::poset::cb::{symbolic_cb, ReplicatedPoset};
use cardseq::poset::tower::make_tower;
use cardseq::poset::validate_poset;
use cardseq::report::Report;
use cardseq::sample::{self, ordinal_below};
use cardseq::tree::IntervalTree;
use cardseq::universe::{split_f, SplitResult, UniverseSpec};
use cardseq::walks::{check_e_step, check_gamma_absent, check_gamma_visit, check_walk_shape};
use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Format, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Name {
    Ordinal,
    Tree,
    Star,
    Walks,
    Adequacy,
    Poset,
    Forcing,
    Chain,
}

fn sampled(name: Name) -> bool {
    !matches!(name, Name::Ordinal | Name::Tree)
}

pub fn walk_check(t: &IntervalTree, s: &SplitResult, name: &str, samples: usize, seed: u64) -> Result<(Report, usize), Usage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alphas = Vec::new();
    for b in &s.l_tilde {
        let j = t.j_interval(&s.gamma_of[b])?;
        let span = Ordinal::ot_diff(&j.lo, &j.hi)?;
        for _ in 0..samples {
            alphas.push(if rng.gen_bool(0.5) { ordinal_below(&mut rng, b, 3) } else { j.lo.add(&ordinal_below(&mut rng, &span, 3)) });
        }
    }
    Ok(match name {
        "gamma-visit" => check_gamma_visit(t, s, &alphas)?,
        "e-step" => check_e_step(t, s, &alphas)?,
        _ => check_gamma_absent(t, s, &alphas)?,
    })
}

/// Ordinals `w^2*a + w*b + c` with coefficients at most `k`.
fn small_ordinals(k: u64) -> Vec<Ordinal> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k {
            for c in 0..=k {
                let x = Ordinal::monomial(Ordinal::nat(2), a).add(&Ordinal::monomial(Ordinal::one(), b)).plus_nat(c);
                out.push(x);
            }
        }
    }
    out
}

fn ordinal_suite() -> (Report, usize) {
    let xs = small_ordinals(2);
    let mut r = Report::new();
    let mut n = 0;
    for a in &xs {
        let back: Result<Ordinal, _> = a.to_string().parse();
        r.check(back.as_ref() == Ok(a), "round-trip", || format!("{a} reparses as {back:?}"));
        for b in &xs {
            n += 1;
            let c = a.add(b);
            r.check(&c >= a && &c >= b, "add-monotone", || format!("{a} + {b} = {c}"));
            r.check(Ordinal::ot_diff(a, &c).as_ref() == Ok(b), "ot-diff", || format!("ot_diff({a}, {c}) is not {b}"));
            r.check(Ordinal::ot_diff(a, b).is_ok() == (a <= b), "ot-diff-domain", || format!("ot_diff({a}, {b}) against the order"));
        }
    }
    (r, n)
}

fn adequacy_suite(t: &IntervalTree, samples: usize, rng: &mut ChaCha8Rng) -> Result<(Report, usize), Usage> {
    let e: Vec<Ordinal> = t.e_seq(&t.root())?.prefix(6);
    let eset: BTreeSet<Ordinal> = e.iter().cloned().collect();
    let mut sets: Vec<BTreeSet<Ordinal>> = Vec::new();
    for mask in 1u32..(1 << e.len()) {
        if mask.count_ones() <= 2 {
            sets.push((0..e.len()).filter(|i| mask >> i & 1 == 1).map(|i| e[i].clone()).collect());
        }
    }
    let mut r = Report::new();
    let mut n = 0;
    let mut check = |fam: &[BTreeSet<Ordinal>], r: &mut Report| -> Result<(), Usage> {
        n += 1;
        let rep = adequacy_check(fam, intersection_rule(&eset))?;
        r.check(rep.pass, "adequacy", || format!("{fam:?}: {:?}", rep.violations));
        Ok(())
    };
    for a in &sets {
        for b in &sets {
            check(&[a.clone(), b.clone()], &mut r)?;
        }
    }
    for _ in 0..samples {
        let k = rng.gen_range(2..5);
        let fam: Vec<BTreeSet<Ordinal>> = (0..k)
            .map(|_| {
                let m = rng.gen_range(1..=e.len());
                e.choose_multiple(rng, m).cloned().collect()
            })
            .collect();
        check(&fam, &mut r)?;
    }
    Ok((r, n))
}

fn poset_suite(samples: usize, rng: &mut ChaCha8Rng) -> (Report, usize) {
    let mut r = Report::new();
    let bound = Ordinal::omega_pow(Ordinal::nat(3));
    for _ in 0..samples {
        let h = ordinal_below(rng, &bound, 3).succ();
        let p = make_tower(&h, &["b".into()]).expect("height below w^w");
        r.extend(validate_poset(&p));
        let rp = ReplicatedPoset::from_poset(&p);
        let cb = symbolic_cb(&rp);
        let levels: Vec<Ordinal> = rp.levels().into_iter().collect();
        for (c, k) in rp.classes.iter().zip(&cb.rank) {
            let idx = levels.iter().position(|l| l == &c.level).expect("own level");
            r.check(idx == *k, "rank-is-level-index", || format!("height {h}: {} has rank {k}, level index {idx}", c.name));
        }
    }
    (r, samples)
}

fn forcing_suite(u: &UniverseSpec, t: &IntervalTree, s: &SplitResult, samples: usize, rng: &mut ChaCha8Rng) -> (Report, usize, usize) {
    let mut r = Report::new();
    let mut refused = 0;
    for _ in 0..samples {
        let steps = rng.gen_range(0..6);
        let p = gen::condition(rng, u, t, s, steps);
        let req = gen::request(rng, u, s, &p);
        match req.apply(u, t, s, &p) {
            Ok(q) => {
                let v = validate(u, t, s, &q);
                r.check(v.is_ok(), "density-output-valid", || format!("{req:?}: {v}"));
                r.check(q.extends(&p), "density-output-extends", || format!("{req:?}"));
            }
            Err(_) => refused += 1,
        }
    }
    // a point below w + 1 with nothing at w between them
    let (a, b) = (Point::unit(Ordinal::zero(), 0), Point::unit(Ordinal::omega().succ(), 0));
    if b.pi < u.delta {
        let mut c = Condition::new();
        c.insert_point(a.clone());
        c.insert_point(b.clone());
        c.insert_lt(a.clone(), b.clone());
        c.set_inf(&a, &b, [a.clone()].into());
        r.check(validate(u, t, s, &c).has_rule("P4"), "walk-clause-fixture", || "unrealized walk accepted".into());
    }
    (r, samples, refused)
}

pub fn run(u: &UniverseSpec, t: &IntervalTree, s: &SplitResult, name: Name, seed: Option<u64>, samples: Option<usize>, format: Format) -> Result<u8, Usage> {
    if sampled(name) && seed.is_none() {
        return Err(Usage(format!("suite {name:?} samples at random and needs --seed").to_lowercase()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    let mut notes = Vec::new();
    let (report, n) = match name {
        Name::Ordinal => ordinal_suite(),
        Name::Tree => (t.check_tree_facts(4, 4, &canonical_levels(&u.delta))?, 1),
        Name::Star => {
            let k = samples.unwrap_or(20);
            let mut r = t.check_star(s)?;
            for _ in 0..k {
                let v = sample::universe(&mut rng, 2);
                let tv = IntervalTree::new(v.clone());
                let sv = split_f(&v, &tv)?;
                r.extend(tv.check_star(&sv)?);
                r.extend(sv.check_invariants(&v));
            }
            (r, k + 1)
        }
        Name::Walks => {
            let k = samples.unwrap_or(200);
            let mut r = Report::new();
            let lv = canonical_levels(&u.delta);
            for a in &lv {
                for b in lv.iter().filter(|b| *b > a) {
                    r.extend(check_walk_shape(t, a, b)?);
                }
            }
            let mut total = 0;
            for c in ["gamma-visit", "e-step", "gamma-absent"] {
                let (rr, m) = walk_check(t, s, c, k, rng.gen())?;
                r.extend(rr);
                total += m;
            }
            (r, total)
        }
        Name::Adequacy => adequacy_suite(t, samples.unwrap_or(1000), &mut rng)?,
        Name::Poset => poset_suite(samples.unwrap_or(100), &mut rng),
        Name::Forcing => {
            let (r, n, refused) = forcing_suite(u, t, s, samples.unwrap_or(200), &mut rng);
            notes.push(format!("{refused} requests refused"));
            (r, n)
        }
        Name::Chain => {
            let steps = samples.unwrap_or(40);
            let sched = Schedule::Saturation { steps, seed: rng.gen() };
            let a = run_chain(u, t, s, &sched, 4, &[])?;
            let b = run_chain(u, t, s, &sched, 4, &[])?;
            let mut r = Report::new();
            let (ja, jb) = (serde_json::to_string(&a)?, serde_json::to_string(&b)?);
            r.check(ja == jb, "chain-deterministic", || "two runs differ".into());
            for g in &a.growth {
                r.check(g.counts.windows(2).all(|w| w[0] <= w[1]), "growth-monotone", || format!("{} at {}: {:?}", g.target, g.alpha, g.counts));
            }
            notes.push(format!("{} requests refused", a.refused.len()));
            (r, steps)
        }
    };
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({ "suite": format!("{name:?}").to_lowercase(), "instances": n, "notes": notes, "report": report }))?
        ),
        _ => {
            println!("{}: {n} instances{}", format!("{name:?}").to_lowercase(), notes.iter().map(|x| format!(", {x}")).collect::<String>());
            if report.is_ok() {
                println!("ok");
            } else {
                print!("{report}");
            }
        }
    }
    Ok(u8::from(!report.is_ok()))
}
