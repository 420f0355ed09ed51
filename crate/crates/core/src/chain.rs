//! Chains of density steps: a fold of point additions and extensions over a
//! schedule, with checkpointed level counts and predecessor growth.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forcing::condition::{validate, Condition, ConditionJson};
use crate::forcing::density::DensityError;
use crate::forcing::gen::Request;
use crate::forcing::point::{Eta, Point, PointError};
use crate::ordinal::Ordinal;
use crate::report::Report;
use crate::sample::ordinal_below;
use crate::tree::IntervalTree;
use crate::universe::{Span, SpanSet, SplitResult, UniverseSpec};

/// Saturation runs of length `N` are expected to give every tracked pair at
/// least `N / GROWTH_C` predecessors. Tracked extensions take two steps of
/// every four and there are at most `MAX_TRACKED` pairs, so a pair is visited
/// about `N / 18` times; the rest is slack for the warm-up steps.
pub const GROWTH_C: usize = 24;
pub const MAX_TRACKED: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    Fixed(Vec<Request>),
    /// Interleaves target additions, round-robin extensions of the tracked
    /// pairs, an enumeration of `Y`, and random extensions.
    Saturation { steps: usize, seed: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("step {step}: {error}")]
    Step { step: usize, error: DensityError },
    #[error("step {step}: the condition fails validation: {report}")]
    Invalid { step: usize, report: Report },
    #[error("schedule line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub step: usize,
    pub points: usize,
    /// Level to number of points at it.
    pub levels: BTreeMap<String, usize>,
}

/// Predecessors of `target` at level `alpha`, one count per checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Growth {
    pub target: String,
    pub alpha: String,
    pub counts: Vec<usize>,
}

impl Growth {
    pub fn last(&self) -> usize {
        self.counts.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refusal {
    pub step: usize,
    pub request: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub steps: usize,
    pub condition: ConditionJson,
    pub checkpoints: Vec<Checkpoint>,
    pub growth: Vec<Growth>,
    /// Saturation requests the densities refused; fixed schedules never record any.
    pub refused: Vec<Refusal>,
    pub cs: CsReport,
    #[serde(skip)]
    pub final_condition: Condition,
}

impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Request::AddPoint(y) => write!(f, "add {y}"),
            Request::ExtendBelow { tgt, alpha, j } => write!(f, "extend {tgt} {alpha} {j}"),
        }
    }
}

/// One request per line: `add <point>` or `extend <point> <alpha> <j>`.
/// Blank lines and `#` comments are skipped.
pub fn parse_schedule(text: &str, s: &SplitResult) -> Result<Vec<Request>, ChainError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| ChainError::Parse { line: i + 1, reason };
        let pe = |e: PointError| err(e.to_string());
        if let Some(rest) = line.strip_prefix("add ") {
            out.push(Request::AddPoint(Point::parse_with(rest, s).map_err(pe)?));
        } else if let Some(rest) = line.strip_prefix("extend ") {
            let close = rest.rfind('>').ok_or_else(|| err("missing point".into()))?;
            let tgt = Point::parse_with(&rest[..=close], s).map_err(pe)?;
            let args: Vec<&str> = rest[close + 1..].split_whitespace().collect();
            let [alpha, j] = args[..] else {
                return Err(err("expected `extend <point> <alpha> <j>`".into()));
            };
            let alpha: Ordinal = alpha.parse().map_err(|e| err(format!("{e}")))?;
            let j: u32 = j.parse().map_err(|_| err(format!("bad index {j}")))?;
            out.push(Request::ExtendBelow { tgt, alpha, j });
        } else {
            return Err(err(format!("unknown request `{line}`")));
        }
    }
    Ok(out)
}

/// Points of `c` strictly below `t` at level `alpha`.
pub fn predecessors(c: &Condition, t: &Point, alpha: &Ordinal) -> usize {
    c.below(t).iter().filter(|x| &x.pi == alpha).count()
}

fn level_counts(c: &Condition) -> BTreeMap<String, usize> {
    let mut m: BTreeMap<Ordinal, usize> = BTreeMap::new();
    for p in c.points() {
        *m.entry(p.pi.clone()).or_default() += 1;
    }
    m.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Small sample of levels below `delta`: `0, 1, 2` and `w^e*m + r` for
/// `e <= 3`, `m <= 2`, `r <= 1`.
pub fn canonical_levels(delta: &Ordinal) -> Vec<Ordinal> {
    let mut out: BTreeSet<Ordinal> = (0..3).map(Ordinal::nat).collect();
    for e in 1..=3 {
        for m in 1..=2 {
            for r in 0..=1 {
                out.insert(Ordinal::monomial(Ordinal::nat(e), m).plus_nat(r));
            }
        }
    }
    out.into_iter().filter(|x| x < delta).collect()
}

/// Targets are unit points at the three largest infinite successor levels of
/// the sample; each is tracked at up to three levels below it: `0`, `1`, and
/// the limit it succeeds.
pub fn tracked_pairs(u: &UniverseSpec) -> Vec<(Point, Ordinal)> {
    let lv = canonical_levels(&u.delta);
    let targets: Vec<&Ordinal> = lv.iter().filter(|x| x.is_successor() && !x.is_finite()).rev().take(3).collect();
    let mut out = Vec::new();
    for t in targets.into_iter().rev() {
        let p = Point::unit(t.clone(), 0);
        for a in [Ordinal::zero(), Ordinal::one(), t.pred().expect("successor")] {
            out.push((p.clone(), a));
        }
    }
    out.truncate(MAX_TRACKED);
    out
}

/// The `i`-th point of a fixed enumeration of `Y`: unit points over the level
/// sample, alternating with block points and tops when blocks exist.
fn y_point(u: &UniverseSpec, s: &SplitResult, lv: &[Ordinal], i: usize) -> Point {
    let owners: Vec<&Ordinal> = s.l_tilde.iter().collect();
    if !owners.is_empty() && u.lambda > 1 && i % 2 == 1 {
        let k = i / 2;
        let a = owners[k % owners.len()];
        let zetas = (u.lambda - 1).min(3) as usize;
        let zeta = 1 + ((k / owners.len()) % zetas) as u32;
        let n = (k / (owners.len() * zetas)) as u32;
        return if n % 3 == 2 { Point::top(s, a, zeta) } else { Point::block(s, a, zeta, 100 + n) };
    }
    let k = i / 2;
    Point::unit(lv[k % lv.len()].clone(), 1000 + (k / lv.len()) as u32)
}

struct Runner<'a> {
    u: &'a UniverseSpec,
    t: &'a IntervalTree,
    s: &'a SplitResult,
    cur: Condition,
    tracked: Vec<(Point, Ordinal)>,
    checkpoints: Vec<Checkpoint>,
    growth: Vec<Vec<usize>>,
    refused: Vec<Refusal>,
}

impl Runner<'_> {
    fn step(&mut self, step: usize, req: &Request) -> Result<(), DensityError> {
        let next = req.apply(self.u, self.t, self.s, &self.cur)?;
        let rep = validate(self.u, self.t, self.s, &next);
        if !rep.is_ok() {
            return Err(DensityError::Invalid(rep));
        }
        debug_assert!(next.extends(&self.cur), "step {step}");
        self.cur = next;
        Ok(())
    }

    fn checkpoint(&mut self, step: usize) {
        self.checkpoints.push(Checkpoint { step, points: self.cur.len(), levels: level_counts(&self.cur) });
        for (g, (t, a)) in self.growth.iter_mut().zip(&self.tracked) {
            g.push(if self.cur.contains(t) { predecessors(&self.cur, t, a) } else { 0 });
        }
    }

    fn finish(self, steps: usize) -> ChainReport {
        let growth = self
            .tracked
            .iter()
            .zip(self.growth)
            .map(|((t, a), counts)| Growth { target: t.to_string(), alpha: a.to_string(), counts })
            .collect();
        ChainReport {
            steps,
            condition: ConditionJson::from(&self.cur),
            checkpoints: self.checkpoints,
            growth,
            refused: self.refused,
            cs: cs_report(&self.cur, self.u, self.s),
            final_condition: self.cur,
        }
    }
}

fn checkpoint_steps(n: usize, k: usize) -> BTreeSet<usize> {
    (1..=k).map(|i| n * i / k.max(1)).filter(|&x| x > 0).collect()
}

/// Runs the schedule from the empty condition, validating after every step.
/// A fixed schedule stops at the first refused request; a saturation schedule
/// records refusals and carries on. `tracked` is ignored for saturation, which
/// tracks [`tracked_pairs`].
pub fn run_chain(
    u: &UniverseSpec,
    t: &IntervalTree,
    s: &SplitResult,
    sched: &Schedule,
    checkpoints: usize,
    tracked: &[(Point, Ordinal)],
) -> Result<ChainReport, ChainError> {
    let tracked = match sched {
        Schedule::Fixed(_) => tracked.to_vec(),
        Schedule::Saturation { .. } => tracked_pairs(u),
    };
    let mut r = Runner {
        u,
        t,
        s,
        cur: Condition::new(),
        growth: vec![Vec::new(); tracked.len()],
        tracked,
        checkpoints: Vec::new(),
        refused: Vec::new(),
    };
    match sched {
        Schedule::Fixed(reqs) => {
            let marks = checkpoint_steps(reqs.len(), checkpoints);
            for (i, req) in reqs.iter().enumerate() {
                r.step(i, req).map_err(|error| match error {
                    DensityError::Invalid(report) => ChainError::Invalid { step: i, report },
                    error => ChainError::Step { step: i, error },
                })?;
                if marks.contains(&(i + 1)) {
                    r.checkpoint(i + 1);
                }
            }
            Ok(r.finish(reqs.len()))
        }
        Schedule::Saturation { steps, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let marks = checkpoint_steps(*steps, checkpoints);
            let lv = canonical_levels(&u.delta);
            let targets: Vec<Point> = r.tracked.iter().map(|(t, _)| t.clone()).collect::<BTreeSet<_>>().into_iter().collect();
            let (mut rr, mut yi) = (0usize, 0usize);
            for i in 0..*steps {
                let req = if i < targets.len() {
                    Request::AddPoint(targets[i].clone())
                } else {
                    match (i - targets.len()) % 4 {
                        0 | 1 if !r.tracked.is_empty() => {
                            let (tgt, alpha) = r.tracked[rr % r.tracked.len()].clone();
                            rr += 1;
                            let j = predecessors(&r.cur, &tgt, &alpha) as u32;
                            Request::ExtendBelow { tgt, alpha, j }
                        }
                        2 => loop {
                            let y = y_point(u, s, &lv, yi);
                            yi += 1;
                            if !r.cur.contains(&y) {
                                break Request::AddPoint(y);
                            }
                        },
                        _ => match r.cur.points().iter().filter(|x| !x.pi.is_zero()).choose(&mut rng).cloned() {
                            Some(tgt) => {
                                let alpha = ordinal_below(&mut rng, &tgt.pi, 3);
                                Request::ExtendBelow { tgt, alpha, j: rng.gen_range(0..3) }
                            }
                            None => Request::AddPoint(y_point(u, s, &lv, 0)),
                        },
                    }
                };
                match r.step(i, &req) {
                    Ok(()) => {}
                    Err(DensityError::Invalid(report)) => return Err(ChainError::Invalid { step: i, report }),
                    Err(e) => r.refused.push(Refusal { step: i, request: req.to_string(), reason: e.to_string() }),
                }
                if marks.contains(&(i + 1)) {
                    r.checkpoint(i + 1);
                }
            }
            Ok(r.finish(*steps))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Marker {
    Small,
    /// Level inside `[gamma_b, b]` for a met block owner `b`; `blocks` counts
    /// the block indices met there.
    Big { blocks: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: Ordinal,
    pub count: usize,
    pub marker: Marker,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsReport {
    pub levels: Vec<LevelCount>,
    /// Union of `[gamma_b, b]` over the block owners the condition meets.
    pub big: SpanSet,
    pub f1_big: SpanSet,
    pub matches_f1: bool,
}

/// Level counts of the fragment as the block transform would lay it out
/// (tops move up to their owner), with Big markers on the spans of the blocks
/// it meets. Span endpoints are listed even when no point sits there.
pub fn cs_report(cond: &Condition, _u: &UniverseSpec, s: &SplitResult) -> CsReport {
    let mut met: BTreeMap<Ordinal, BTreeSet<u32>> = BTreeMap::new();
    let mut counts: BTreeMap<Ordinal, usize> = BTreeMap::new();
    for p in cond.points() {
        let level = match &p.eta {
            Eta::Top { alpha, .. } => alpha.clone(),
            _ => p.pi.clone(),
        };
        *counts.entry(level).or_default() += 1;
        if let Eta::Block { alpha, zeta, .. } | Eta::Top { alpha, zeta } = &p.eta {
            met.entry(alpha.clone()).or_default().insert(*zeta);
        }
    }
    let spans: Vec<(Span, usize)> = met.iter().map(|(b, z)| (Span::closed(s.gamma_of[b].clone(), b), z.len())).collect();
    for (sp, _) in &spans {
        counts.entry(sp.lo.clone()).or_default();
        counts.entry(sp.hi.pred().expect("closed span")).or_default();
    }
    let levels = counts
        .into_iter()
        .map(|(level, count)| {
            let marker = match spans.iter().find(|(sp, _)| sp.contains(&level)) {
                Some((_, k)) => Marker::Big { blocks: *k },
                None => Marker::Small,
            };
            LevelCount { level, count, marker }
        })
        .collect();
    let big = SpanSet::from_spans(spans.into_iter().map(|(sp, _)| sp));
    CsReport { matches_f1: big == s.f1_big, levels, big, f1_big: s.f1_big.clone() }
}
