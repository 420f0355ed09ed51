//! Cantor–Bendixson ranks: the symbolic removal rule on class DAGs and literal
//! isolated-point removal on finite topologies.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Card, LcsPoset, Supply};
use crate::ordinal::Ordinal;
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class {
    pub name: String,
    pub level: Ordinal,
    pub supply: Supply,
}

/// A finite DAG of classes; `below[i]` is the strict lower set of class `i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicatedPoset {
    pub classes: Vec<Class>,
    pub below: Vec<BTreeSet<usize>>,
}

impl ReplicatedPoset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, level: Ordinal, supply: Supply) -> usize {
        self.classes.push(Class { name: name.into(), level, supply });
        self.below.push(BTreeSet::new());
        self.classes.len() - 1
    }

    /// Records `lo < hi` and closes transitively.
    pub fn edge(&mut self, lo: usize, hi: usize) {
        let mut add: BTreeSet<usize> = self.below[lo].clone();
        add.insert(lo);
        for i in 0..self.classes.len() {
            if i == hi || self.below[i].contains(&hi) {
                self.below[i].extend(add.iter().copied());
            }
        }
    }

    /// One class per point of `p`, with its supply.
    pub fn from_poset(p: &LcsPoset) -> Self {
        let pts: Vec<_> = p.points().iter().collect();
        let ix: BTreeMap<_, _> = pts.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let mut r = ReplicatedPoset::new();
        for x in &pts {
            r.add(x.to_string(), x.level.clone(), p.supply(x));
        }
        for (a, b) in p.less_iter() {
            r.below[ix[b]].insert(ix[a]);
        }
        r
    }

    /// Edges go strictly down in level and the lower sets are acyclic.
    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        for (i, b) in self.below.iter().enumerate() {
            for &j in b {
                r.check(self.classes[j].level < self.classes[i].level, "dag-level", || {
                    format!("{} below {} without a lower level", self.classes[j].name, self.classes[i].name)
                });
            }
        }
        r
    }

    pub fn levels(&self) -> BTreeSet<Ordinal> {
        self.classes.iter().map(|c| c.level.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CbReport {
    /// Removal stage per class, in class order.
    pub rank: Vec<usize>,
    pub height: usize,
    /// Total supply removed at each stage.
    pub cardinal_sequence: Vec<Card>,
}

impl CbReport {
    pub fn rank_of(&self, p: &ReplicatedPoset, name: &str) -> Option<usize> {
        p.classes.iter().position(|c| c.name == name).map(|i| self.rank[i])
    }
}

/// Removes, stage by stage, every class with no remaining supply-`w` class
/// strictly below it.
pub fn symbolic_cb(p: &ReplicatedPoset) -> CbReport {
    let n = p.classes.len();
    let mut rank = vec![usize::MAX; n];
    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut cs = Vec::new();
    let mut stage = 0;
    while !remaining.is_empty() {
        let out: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&c| !p.below[c].iter().any(|d| remaining.contains(d) && p.classes[*d].supply.is_omega()))
            .collect();
        assert!(!out.is_empty(), "a finite DAG always has removable classes");
        let mut card = Card::Finite(0);
        for &c in &out {
            rank[c] = stage;
            remaining.remove(&c);
            card = card.add(p.classes[c].supply.into());
        }
        cs.push(card);
        stage += 1;
    }
    CbReport { rank, height: stage, cardinal_sequence: cs }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiniteCbError {
    #[error("open set names point {0}, outside the space")]
    OutOfRange(usize),
    #[error("the subspace {0:?} has no isolated point")]
    NotScattered(Vec<usize>),
}

/// Ranks of the points `0..n` in the topology generated by `opens`, by literal
/// removal of isolated points.
pub fn finite_cb(n: usize, opens: &[BTreeSet<usize>]) -> Result<Vec<usize>, FiniteCbError> {
    if let Some(&x) = opens.iter().flatten().find(|&&x| x >= n) {
        return Err(FiniteCbError::OutOfRange(x));
    }
    // the least open set around each point
    let nbhd: Vec<BTreeSet<usize>> = (0..n)
        .map(|x| {
            opens.iter().filter(|u| u.contains(&x)).fold((0..n).collect::<BTreeSet<usize>>(), |acc, u| &acc & u)
        })
        .collect();
    let mut rank = vec![0; n];
    let mut rest: BTreeSet<usize> = (0..n).collect();
    let mut stage = 0;
    while !rest.is_empty() {
        let iso: Vec<usize> = rest.iter().copied().filter(|&x| nbhd[x].intersection(&rest).count() == 1).collect();
        if iso.is_empty() {
            return Err(FiniteCbError::NotScattered(rest.into_iter().collect()));
        }
        for x in iso {
            rank[x] = stage;
            rest.remove(&x);
        }
        stage += 1;
    }
    Ok(rank)
}

/// The topology of an instantiated poset. Each point gets its cone minus the
/// cones of its non-replicated predecessors; a replicated class below a point
/// cannot be cut away by finitely many cones.
pub fn instance_opens(inst: &super::Instance) -> Vec<BTreeSet<usize>> {
    (0..inst.copies.len())
        .map(|x| {
            let excl: Vec<usize> = (0..inst.copies.len()).filter(|&y| inst.lt[y][x] && !inst.replicated[y]).collect();
            super::basic_open(inst, x, &excl).expect("strict predecessors")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;

    #[test]
    fn single_omega_class() {
        let mut p = ReplicatedPoset::new();
        p.add("a", ord("0"), Supply::Omega);
        let r = symbolic_cb(&p);
        assert_eq!((r.rank.clone(), r.height), (vec![0], 1));
        assert_eq!(r.cardinal_sequence, vec![Card::Omega]);
    }

    #[test]
    fn omega_class_below_singleton() {
        let mut p = ReplicatedPoset::new();
        let a = p.add("a", ord("0"), Supply::Omega);
        let b = p.add("b", ord("1"), Supply::Finite(1));
        p.edge(a, b);
        let r = symbolic_cb(&p);
        assert_eq!(r.rank, vec![0, 1]);
        assert_eq!(r.height, 2);
    }

    #[test]
    fn finite_class_below_singleton() {
        let mut p = ReplicatedPoset::new();
        let a = p.add("a", ord("0"), Supply::Finite(3));
        let b = p.add("b", ord("1"), Supply::Finite(1));
        p.edge(a, b);
        let r = symbolic_cb(&p);
        assert_eq!((r.rank.clone(), r.height), (vec![0, 0], 1));
        assert_eq!(r.cardinal_sequence, vec![Card::Finite(4)]);
    }

    #[test]
    fn edges_must_descend() {
        let mut p = ReplicatedPoset::new();
        let a = p.add("a", ord("1"), Supply::Omega);
        let b = p.add("b", ord("1"), Supply::Finite(1));
        p.edge(a, b);
        assert!(p.validate().has_rule("dag-level"));
    }

    #[test]
    fn finite_topologies() {
        // discrete
        let d: Vec<BTreeSet<usize>> = (0..3).map(|i| [i].into()).collect();
        assert_eq!(finite_cb(3, &d).unwrap(), vec![0, 0, 0]);
        // Sierpinski space: {1} open
        assert_eq!(finite_cb(2, &[[1].into()]).unwrap(), vec![1, 0]);
        // indiscrete pair is not scattered
        assert!(matches!(finite_cb(2, &[]), Err(FiniteCbError::NotScattered(_))));
        assert!(matches!(finite_cb(1, &[[3].into()]), Err(FiniteCbError::OutOfRange(3))));
    }

    #[test]
    fn instance_ranks_follow_supply() {
        use crate::poset::{instantiate, LcsPoset};
        let over_w = LcsPoset::parse("0/a\n1/t\nsupply 0/a = w\norder 0/a < 1/t\ninf {0/a, 1/t} = {0/a}\n").unwrap();
        let inst = instantiate(&over_w, 3);
        let r = finite_cb(inst.copies.len(), &instance_opens(&inst)).unwrap();
        assert_eq!(r.iter().filter(|&&k| k == 1).count(), 1);
        let over_two = LcsPoset::parse("0/a\n1/t\nsupply 0/a = 2\norder 0/a < 1/t\ninf {0/a, 1/t} = {0/a}\n").unwrap();
        let inst = instantiate(&over_two, 3);
        assert_eq!(finite_cb(inst.copies.len(), &instance_opens(&inst)).unwrap(), vec![0; 3]);
    }
}
