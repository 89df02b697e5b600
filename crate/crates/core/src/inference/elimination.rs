use std::collections::{BTreeMap, BTreeSet};

use super::Factor;
use crate::bn::BayesianNetwork;
use crate::error::{Error, Result};

/// Observed categories, keyed by variable name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evidence {
    observed: BTreeMap<String, String>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, variable: &str, category: &str) -> Self {
        self.observed.insert(variable.to_string(), category.to_string());
        self
    }

    pub fn insert(&mut self, variable: &str, category: &str) {
        self.observed.insert(variable.to_string(), category.to_string());
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    /// `(variable index, category index)` pairs.
    pub fn resolve(&self, bn: &BayesianNetwork) -> Result<Vec<(usize, usize)>> {
        self.observed
            .iter()
            .map(|(var, cat)| {
                let v = bn.index_of(var)?;
                let c = bn
                    .alphabet(v)
                    .iter()
                    .position(|a| a == cat)
                    .ok_or_else(|| Error::UnknownCategory { variable: var.clone(), category: cat.clone() })?;
                Ok((v, c))
            })
            .collect()
    }
}

/// `P(query | evidence)` over the query's alphabet.
pub fn eliminate(bn: &BayesianNetwork, query: &str, evidence: &Evidence) -> Result<Vec<f64>> {
    let q = bn.index_of(query)?;
    let ev = evidence.resolve(bn)?;
    posterior(bn, q, &ev, None)
}

/// As [`eliminate`] but with an explicit elimination order. Variables not
/// listed are eliminated afterwards in index order.
pub fn eliminate_with_order(
    bn: &BayesianNetwork,
    query: &str,
    evidence: &Evidence,
    order: &[usize],
) -> Result<Vec<f64>> {
    let q = bn.index_of(query)?;
    let ev = evidence.resolve(bn)?;
    posterior(bn, q, &ev, Some(order))
}

/// Prior marginal of every variable, in node order.
pub fn all_marginals(bn: &BayesianNetwork) -> Result<Vec<Vec<f64>>> {
    (0..bn.len()).map(|v| posterior(bn, v, &[], None)).collect()
}

pub(crate) fn posterior(
    bn: &BayesianNetwork,
    query: usize,
    evidence: &[(usize, usize)],
    order: Option<&[usize]>,
) -> Result<Vec<f64>> {
    if evidence.iter().any(|&(v, _)| v == query) {
        return Err(Error::Config(format!("query `{}` is also observed", bn.dag().name(query))));
    }
    // Nodes outside the ancestral set of {query} ∪ evidence sum to one and
    // are dropped up front.
    let relevant = ancestral_set(bn, std::iter::once(query).chain(evidence.iter().map(|&(v, _)| v)));
    let mut factors: Vec<Factor> = relevant
        .iter()
        .map(|&v| evidence.iter().fold(Factor::from_cpt(bn, v), |f, &(ev, val)| f.reduce(ev, val)))
        .collect();

    let observed: BTreeSet<usize> = evidence.iter().map(|&(v, _)| v).collect();
    let hidden: Vec<usize> = relevant.iter().copied().filter(|v| *v != query && !observed.contains(v)).collect();
    let order = match order {
        Some(o) => {
            let mut full: Vec<usize> = o.iter().copied().filter(|v| hidden.contains(v)).collect();
            full.extend(hidden.iter().filter(|v| !o.contains(v)));
            full
        }
        None => min_degree_order(bn, &factors, &hidden),
    };

    for var in order {
        let (with, without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.contains(var));
        factors = without;
        if let Some(prod) = with.into_iter().reduce(|a, b| a.product(&b)) {
            factors.push(prod.sum_out(var));
        }
    }
    let joint = factors.into_iter().fold(Factor::scalar(1.0), |a, b| a.product(&b));
    debug_assert_eq!(joint.scope, vec![query]);
    let total = joint.total();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroProbabilityEvidence);
    }
    Ok(joint.values.iter().map(|v| v / total).collect())
}

fn ancestral_set(bn: &BayesianNetwork, seeds: impl Iterator<Item = usize>) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    let mut stack: Vec<usize> = seeds.collect();
    while let Some(v) = stack.pop() {
        if set.insert(v) {
            stack.extend_from_slice(bn.dag().parents(v));
        }
    }
    set
}

/// Greedy min-degree order on the interaction graph of `factors`; ties go
/// to the lexicographically smaller variable name.
pub(crate) fn min_degree_order(bn: &BayesianNetwork, factors: &[Factor], hidden: &[usize]) -> Vec<usize> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for f in factors {
        for &a in &f.scope {
            let entry = adj.entry(a).or_default();
            entry.extend(f.scope.iter().copied().filter(|&b| b != a));
        }
    }
    let mut remaining: BTreeSet<usize> = hidden.iter().copied().collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let &next = remaining
            .iter()
            .min_by(|&&a, &&b| {
                let da = adj.get(&a).map_or(0, BTreeSet::len);
                let db = adj.get(&b).map_or(0, BTreeSet::len);
                da.cmp(&db).then_with(|| bn.dag().name(a).cmp(bn.dag().name(b)))
            })
            .expect("non-empty");
        let neighbours = adj.remove(&next).unwrap_or_default();
        for &a in &neighbours {
            if let Some(set) = adj.get_mut(&a) {
                set.remove(&next);
                set.extend(neighbours.iter().copied().filter(|&b| b != a));
            }
        }
        remaining.remove(&next);
        order.push(next);
    }
    order
}
