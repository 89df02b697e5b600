//! Greedy hill climbing over DAGs with single-edge add, remove and reverse
//! moves, starting from the empty graph.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::score::family_bic;
use super::Dag;
use crate::discretizer::DiscreteDataset;
use crate::error::{Error, Result};

/// Gains at or below this are treated as no improvement; it absorbs
/// floating-point noise between score-equivalent graphs.
pub const MIN_IMPROVEMENT: f64 = 1e-9;

/// Relative gap under which two candidate gains count as equal, so that
/// Markov-equivalent moves fall through to the name tie-break.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_parents: Option<usize>,
    pub max_iterations: usize,
    pub allow_add: bool,
    pub allow_remove: bool,
    pub allow_reverse: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { max_parents: Some(4), max_iterations: 1000, allow_add: true, allow_remove: true, allow_reverse: true }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_parents == Some(0) {
            return Err(Error::Config("max_parents must be at least 1".into()));
        }
        Ok(())
    }
}

/// Variant order matches the alphabetical order of the operator names,
/// which is the first tie-break key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Add,
    Remove,
    Reverse,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Add => "add",
            Operator::Remove => "remove",
            Operator::Reverse => "reverse",
        })
    }
}

/// A single-edge move. For `Remove` and `Reverse`, `parent -> child` is the
/// existing edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub op: Operator,
    pub parent: usize,
    pub child: usize,
}

#[derive(Clone, Debug)]
pub struct SearchStep {
    pub mv: Move,
    pub gain: f64,
    pub score: f64,
}

#[derive(Clone, Debug)]
pub struct SearchTrace {
    pub dag: Dag,
    pub initial_score: f64,
    pub steps: Vec<SearchStep>,
}

impl SearchTrace {
    pub fn final_score(&self) -> f64 {
        self.steps.last().map_or(self.initial_score, |s| s.score)
    }
}

/// Memoised family scores keyed on `(child, sorted parents)`.
struct FamilyCache<'a> {
    data: &'a DiscreteDataset,
    scores: HashMap<(usize, Vec<usize>), f64>,
}

impl<'a> FamilyCache<'a> {
    fn new(data: &'a DiscreteDataset) -> Self {
        Self { data, scores: HashMap::new() }
    }

    fn score(&mut self, child: usize, parents: &[usize]) -> f64 {
        let key = (child, parents.to_vec());
        if let Some(&s) = self.scores.get(&key) {
            return s;
        }
        let s = family_bic(self.data, child, parents);
        self.scores.insert(key, s);
        s
    }

    fn with(&mut self, child: usize, parents: &[usize], extra: usize) -> f64 {
        let mut p = parents.to_vec();
        let pos = p.binary_search(&extra).unwrap_or_else(|i| i);
        p.insert(pos, extra);
        self.score(child, &p)
    }

    fn without(&mut self, child: usize, parents: &[usize], drop: usize) -> f64 {
        let p: Vec<usize> = parents.iter().copied().filter(|&x| x != drop).collect();
        self.score(child, &p)
    }
}

pub fn hill_climb(data: &DiscreteDataset, cfg: &SearchConfig) -> Result<Dag> {
    Ok(hill_climb_traced(data, cfg)?.dag)
}

/// Hill climbing that also reports every accepted move and the running score.
pub fn hill_climb_traced(data: &DiscreteDataset, cfg: &SearchConfig) -> Result<SearchTrace> {
    cfg.validate()?;
    let n = data.n_vars();
    let names = data.names();
    let mut dag = Dag::empty(names.to_vec());
    let mut cache = FamilyCache::new(data);
    let mut current: Vec<f64> = (0..n).map(|i| cache.score(i, &[])).collect();
    let initial_score: f64 = current.iter().sum();
    let mut score = initial_score;
    let max_parents = cfg.max_parents.unwrap_or(usize::MAX);
    let mut steps = Vec::new();

    for _ in 0..cfg.max_iterations {
        let mut best: Option<(f64, Move)> = None;
        let mut consider = |gain: f64, mv: Move| {
            let better = match &best {
                None => true,
                Some((g, m)) => {
                    if (gain - g).abs() <= TIE_TOLERANCE * g.abs().max(1.0) {
                        tie_key(names, &mv) < tie_key(names, m)
                    } else {
                        gain.partial_cmp(g) == Some(Ordering::Greater)
                    }
                }
            };
            if better {
                best = Some((gain, mv));
            }
        };

        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                if dag.has_edge(u, v) {
                    let drop_gain = cache.without(v, dag.parents(v), u) - current[v];
                    if cfg.allow_remove {
                        consider(drop_gain, Move { op: Operator::Remove, parent: u, child: v });
                    }
                    if cfg.allow_reverse && dag.parents(u).len() < max_parents && !dag.reaches(u, v, Some((u, v))) {
                        let gain = drop_gain + cache.with(u, dag.parents(u), v) - current[u];
                        consider(gain, Move { op: Operator::Reverse, parent: u, child: v });
                    }
                } else if cfg.allow_add
                    && !dag.has_edge(v, u)
                    && dag.parents(v).len() < max_parents
                    && !dag.reaches(v, u, None)
                {
                    let gain = cache.with(v, dag.parents(v), u) - current[v];
                    consider(gain, Move { op: Operator::Add, parent: u, child: v });
                }
            }
        }

        let Some((gain, mv)) = best else { break };
        if gain <= MIN_IMPROVEMENT {
            break;
        }
        match mv.op {
            Operator::Add => dag.add_edge(mv.parent, mv.child)?,
            Operator::Remove => dag.remove_edge(mv.parent, mv.child)?,
            Operator::Reverse => dag.reverse_edge(mv.parent, mv.child)?,
        }
        assert!(dag.is_acyclic(), "accepted move {mv:?} produced a cycle");
        for node in [mv.parent, mv.child] {
            current[node] = cache.score(node, dag.parents(node));
        }
        score += gain;
        steps.push(SearchStep { mv, gain, score });
    }

    Ok(SearchTrace { dag, initial_score, steps })
}

fn tie_key<'a>(names: &'a [String], mv: &Move) -> (Operator, &'a str, &'a str) {
    (mv.op, names[mv.parent].as_str(), names[mv.child].as_str())
}
