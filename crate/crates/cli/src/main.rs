use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cardseq::chain::{parse_schedule, run_chain, Schedule};
use cardseq::delta::{adequacy_check, g_pair, intersection_rule};
use cardseq::forcing::amalgam::{amalgamate, thinning_check, PointMap};
use cardseq::forcing::condition::{validate, Condition, ConditionJson};
use cardseq::forcing::density::extend_below;
use cardseq::forcing::gen::Request;
use cardseq::forcing::oracle::brute_force_common_extension;
use cardseq::forcing::point::Point;
use cardseq::ordinal::Ordinal;
use cardseq::poset::cb::{symbolic_cb, ReplicatedPoset};
use cardseq::poset::tower::transform_blocks;
use cardseq::poset::{validate_poset, LcsPoset};
use cardseq::report::Report;
use cardseq::tree::{levels_to_dot, IntervalTree};
use cardseq::universe::{split_f, SplitResult, UniverseSpec};
use cardseq::walks::{separation, walk};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

mod suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cardseq", version, about = "Interval trees, walks, LCS posets and finite forcing conditions over ordinals")]
struct Cli {
    /// Universe file; the reference universe when omitted.
    #[arg(long, global = true)]
    universe: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Tree levels 0..=depth, or only the intervals meeting the given ordinals.
    Tree {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Children listed per interval with an infinite sequence.
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, value_delimiter = ';')]
        points: Vec<Ordinal>,
    },
    /// The walk from A up to B with its separation data, or a walk suite.
    Walk {
        a: Option<Ordinal>,
        b: Option<Ordinal>,
        #[arg(long, value_parser = ["gamma-visit", "e-step", "gamma-absent"])]
        check: Option<String>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The set G{A, B}.
    Gfun { a: Ordinal, b: Ordinal },
    /// Adequacy of a family under the intersection rule.
    Adequacy { file: PathBuf },
    ValidatePoset { file: PathBuf },
    /// Cantor-Bendixson ranks of a poset file, with supplies as class sizes.
    Cb { file: PathBuf },
    /// Replaces the blocks of a condition by towers.
    Transform { file: PathBuf },
    CheckCond { file: PathBuf },
    /// Adds a point at level ALPHA with index above J below TARGET.
    Extend {
        file: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        alpha: Ordinal,
        #[arg(long, default_value_t = 0)]
        j: u32,
    },
    Amalgamate {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    OracleExtend {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// Runs a schedule file, or the saturation schedule with --saturate.
    Chain {
        #[arg(long, conflicts_with = "saturate", required_unless_present = "saturate")]
        schedule: Option<PathBuf>,
        #[arg(long)]
        saturate: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        checkpoints: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Suite {
        #[arg(value_enum)]
        name: suite::Name,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Exit 2 with a diagnostic.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Ctx {
    u: UniverseSpec,
    t: IntervalTree,
    s: SplitResult,
    format: Format,
}

fn read(p: &Path) -> Result<String, Usage> {
    fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))
}

fn load_universe(p: Option<&Path>) -> Result<UniverseSpec, Usage> {
    let Some(p) = p else { return Ok(UniverseSpec::u_star()) };
    let u: UniverseSpec = read(p)?.parse().map_err(|e| Usage(format!("{}: {e}", p.display())))?;
    let r = u.validate();
    if !r.is_ok() {
        return Err(Usage(format!("{}: invalid universe\n{r}", p.display())));
    }
    Ok(u)
}

impl Ctx {
    fn condition(&self, p: &Path) -> Result<Condition, Usage> {
        Condition::parse(&read(p)?, &self.s).map_err(|e| Usage(format!("{}: {e}", p.display())))
    }

    fn emit_condition(&self, c: &Condition) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&ConditionJson::from(c)).expect("serializable")),
            _ => print!("{}", c.to_text()),
        }
    }

    /// Prints a report and maps it to the exit status.
    fn verdict(&self, r: &Report) -> u8 {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(r).expect("serializable")),
            _ if r.is_ok() => println!("ok"),
            _ => print!("{r}"),
        }
        u8::from(!r.is_ok())
    }
}

fn set_text(s: &BTreeSet<Ordinal>) -> String {
    let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

/// One `<a> -> <b>` pair per line.
fn parse_map(text: &str, s: &SplitResult) -> Result<PointMap, Usage> {
    let mut g = PointMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once("->").ok_or_else(|| Usage(format!("map line {}: expected `<a> -> <b>`", i + 1)))?;
        g.insert(Point::parse_with(a.trim(), s)?, Point::parse_with(b.trim(), s)?);
    }
    Ok(g)
}

/// Lines `{a, b, ...}` give the family; an optional `E = {...}` line gives the
/// rule's domain, which otherwise is the union of the family.
fn parse_family(text: &str) -> Result<(Vec<BTreeSet<Ordinal>>, Option<BTreeSet<Ordinal>>), Usage> {
    let set = |s: &str, line: usize| -> Result<BTreeSet<Ordinal>, Usage> {
        let inner = s.trim().strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(|| Usage(format!("family line {line}: expected {{...}}")))?;
        inner.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| x.parse().map_err(Usage::from)).collect()
    };
    let (mut fam, mut e) = (Vec::new(), None);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.strip_prefix("E =").or_else(|| line.strip_prefix("E=")) {
            Some(rest) => e = Some(set(rest, i + 1)?),
            None => fam.push(set(line, i + 1)?),
        }
    }
    Ok((fam, e))
}

fn run(cli: Cli) -> Result<u8, Usage> {
    let u = load_universe(cli.universe.as_deref())?;
    let t = IntervalTree::new(u.clone());
    let s = split_f(&u, &t)?;
    let cx = Ctx { u, t, s, format: cli.format };
    let (u, t, s) = (&cx.u, &cx.t, &cx.s);
    match cli.cmd {
        Cmd::Tree { depth, width, points } => {
            let levels = if points.is_empty() { t.materialize(depth, width)? } else { t.levels_meeting(&points, depth)? };
            match cx.format {
                Format::Dot => print!("{}", levels_to_dot(&levels)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&levels)?),
                Format::Text => {
                    for (n, level) in levels.iter().enumerate() {
                        let v: Vec<String> = level.iter().map(|i| i.to_string()).collect();
                        println!("{n}: {}", v.join(" "));
                    }
                }
            }
            Ok(0)
        }
        Cmd::Walk { a, b, check: Some(name), samples, seed } => {
            if a.is_some() || b.is_some() {
                return Err(Usage("--check takes no ordinals".into()));
            }
            let seed = seed.ok_or_else(|| Usage("--check samples ordinals and needs --seed".into()))?;
            let (r, n) = suite::walk_check(t, s, &name, samples, seed)?;
            if cx.format == Format::Text {
                println!("{name}: {n} instances");
            }
            Ok(cx.verdict(&r))
        }
        Cmd::Walk { a: Some(a), b: Some(b), .. } => {
            let w = walk(t, &a, &b)?;
            let sep = separation(t, &a, &b)?;
            match cx.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&json!({ "walk": w.seq, "separation": sep }))?),
                _ => {
                    println!("{w}");
                    println!("k = {}, I = {}, J = {}, K = {}", sep.k, sep.i, sep.j, sep.kk);
                }
            }
            Ok(0)
        }
        Cmd::Walk { .. } => Err(Usage("walk needs two ordinals or --check".into())),
        Cmd::Gfun { a, b } => {
            let g = g_pair(t, &a, &b)?;
            match cx.format {
                Format::Json => println!("{}", serde_json::to_string(&g)?),
                _ => println!("{}", set_text(&g)),
            }
            Ok(0)
        }
        Cmd::Adequacy { file } => {
            let (fam, e) = parse_family(&read(&file)?)?;
            let e = e.unwrap_or_else(|| fam.iter().flatten().cloned().collect());
            let r = adequacy_check(&fam, intersection_rule(&e))?;
            match cx.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&r)?),
                _ if r.pass => println!("ok"),
                _ => {
                    for v in &r.violations {
                        println!("clause {} on members {:?}: alpha {}, beta {}, tau {}", v.clause, v.pair, v.alpha, v.beta, v.tau);
                    }
                }
            }
            Ok(u8::from(!r.pass))
        }
        Cmd::ValidatePoset { file } => {
            let p = LcsPoset::parse(&read(&file)?)?;
            let r = validate_poset(&p);
            if cx.format == Format::Dot {
                print!("{}", p.to_dot());
                return Ok(u8::from(!r.is_ok()));
            }
            Ok(cx.verdict(&r))
        }
        Cmd::Cb { file } => {
            let p = LcsPoset::parse(&read(&file)?)?;
            let rp = ReplicatedPoset::from_poset(&p);
            let dag = rp.validate();
            if !dag.is_ok() {
                return Ok(cx.verdict(&dag));
            }
            let r = symbolic_cb(&rp);
            match cx.format {
                Format::Json => {
                    let ranks: BTreeMap<&str, usize> = rp.classes.iter().zip(&r.rank).map(|(c, k)| (c.name.as_str(), *k)).collect();
                    println!("{}", serde_json::to_string_pretty(&json!({ "rank": ranks, "height": r.height, "cardinal_sequence": r.cardinal_sequence }))?);
                }
                _ => {
                    for (c, k) in rp.classes.iter().zip(&r.rank) {
                        println!("{} rank {k}", c.name);
                    }
                    println!("height {}", r.height);
                    let cs: Vec<String> = r.cardinal_sequence.iter().map(|c| c.to_string()).collect();
                    println!("cardinal sequence <{}>", cs.join(", "));
                }
            }
            Ok(0)
        }
        Cmd::Transform { file } => {
            let c = cx.condition(&file)?;
            let p = transform_blocks(u, t, s, &c)?;
            let r = validate_poset(&p);
            match cx.format {
                Format::Dot => print!("{}", p.to_dot()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&json!({ "poset": p.to_text(), "report": r }))?),
                Format::Text => {
                    print!("{}", p.to_text());
                    if !r.is_ok() {
                        eprint!("{r}");
                    }
                }
            }
            Ok(u8::from(!r.is_ok()))
        }
        Cmd::CheckCond { file } => {
            let c = cx.condition(&file)?;
            Ok(cx.verdict(&validate(u, t, s, &c)))
        }
        Cmd::Extend { file, target, alpha, j } => {
            let c = cx.condition(&file)?;
            let tgt = Point::parse_with(&target, s)?;
            match extend_below(u, t, s, &c, &tgt, &alpha, j) {
                Ok((q, x)) => {
                    if cx.format == Format::Text {
                        println!("# new point {x}");
                    }
                    cx.emit_condition(&q);
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(1)
                }
            }
        }
        Cmd::Amalgamate { a, b, map } => {
            let (pa, pb) = (cx.condition(&a)?, cx.condition(&b)?);
            let g = parse_map(&read(&map)?, s)?;
            if let Err(r) = thinning_check(t, s, &pa, &pb, &g) {
                return Ok(cx.verdict(&r));
            }
            let z = amalgamate(t, s, &pa, &pb, &g)?;
            let r = validate(u, t, s, &z);
            cx.emit_condition(&z);
            if !r.is_ok() {
                eprint!("{r}");
            }
            Ok(u8::from(!r.is_ok()))
        }
        Cmd::OracleExtend { a, b, bound } => {
            let (pa, pb) = (cx.condition(&a)?, cx.condition(&b)?);
            match brute_force_common_extension(u, t, s, &pa, &pb, bound) {
                Ok(z) => {
                    cx.emit_condition(&z);
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(1)
                }
            }
        }
        Cmd::Chain { schedule, saturate, seed, checkpoints, out } => {
            let (sched, tracked) = match (schedule, saturate) {
                (Some(f), _) => {
                    let reqs = parse_schedule(&read(&f)?, s)?;
                    let mut tracked = Vec::new();
                    for r in &reqs {
                        if let Request::ExtendBelow { tgt, alpha, .. } = r {
                            let pair = (tgt.clone(), alpha.clone());
                            if !tracked.contains(&pair) {
                                tracked.push(pair);
                            }
                        }
                    }
                    (Schedule::Fixed(reqs), tracked)
                }
                (None, Some(steps)) => (Schedule::Saturation { steps, seed }, Vec::new()),
                (None, None) => unreachable!("clap requires one"),
            };
            let rep = match run_chain(u, t, s, &sched, checkpoints, &tracked) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(1);
                }
            };
            let text = serde_json::to_string_pretty(&rep)?;
            match out {
                Some(p) => fs::write(&p, text + "\n").map_err(|e| Usage(format!("{}: {e}", p.display())))?,
                None if cx.format == Format::Json => println!("{text}"),
                None => {}
            }
            if cx.format != Format::Json {
                println!("steps {}, points {}, refused {}", rep.steps, rep.final_condition.len(), rep.refused.len());
                for g in &rep.growth {
                    let c: Vec<String> = g.counts.iter().map(|x| x.to_string()).collect();
                    println!("{} at {}: {}", g.target, g.alpha, c.join(" "));
                }
                let marks: Vec<String> = rep.cs.levels.iter().map(|l| format!("{}:{}{}", l.level, l.count, if matches!(l.marker, cardseq::chain::Marker::Small) { "" } else { "*" })).collect();
                println!("levels {}", marks.join(" "));
            }
            Ok(0)
        }
        Cmd::Suite { name, seed, samples } => suite::run(&cx.u, t, s, name, seed, samples, cx.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
