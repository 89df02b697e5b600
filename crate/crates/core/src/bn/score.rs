//! Decomposable BIC.
//!
//! A family `(child, parents)` scores
//! `sum_jk N_jk ln(N_jk / N_j) - ln(n) / 2 * (r - 1) * q`
//! with `r` the child cardinality and `q` the number of joint parent
//! configurations. Counts are unsmoothed; `0 ln 0 = 0`.

use std::collections::HashMap;

use super::Dag;
use crate::discretizer::DiscreteDataset;

const DENSE_LIMIT: usize = 1 << 20;

/// Joint count table of `(parent configuration, child value)` pairs.
/// Parent configurations are row-major with the first listed parent most
/// significant.
pub(crate) fn family_counts(data: &DiscreteDataset, child: usize, parents: &[usize]) -> Counts {
    let r = data.cardinality(child);
    let q: usize = parents.iter().map(|&p| data.cardinality(p)).product();
    let configs = parent_configs(data, parents);
    let child_col = data.column(child);
    if q.saturating_mul(r) <= DENSE_LIMIT {
        let mut table = vec![0u32; q * r];
        for (row, &j) in configs.iter().enumerate() {
            table[j * r + child_col[row]] += 1;
        }
        Counts::Dense { r, table }
    } else {
        let mut map: HashMap<usize, Vec<u32>> = HashMap::new();
        for (row, &j) in configs.iter().enumerate() {
            map.entry(j).or_insert_with(|| vec![0; r])[child_col[row]] += 1;
        }
        Counts::Sparse { map }
    }
}

pub(crate) fn parent_configs(data: &DiscreteDataset, parents: &[usize]) -> Vec<usize> {
    let mut configs = vec![0usize; data.n_rows()];
    for &p in parents {
        let card = data.cardinality(p);
        for (c, &v) in configs.iter_mut().zip(data.column(p)) {
            *c = *c * card + v;
        }
    }
    configs
}

pub(crate) enum Counts {
    Dense { r: usize, table: Vec<u32> },
    Sparse { map: HashMap<usize, Vec<u32>> },
}

impl Counts {
    /// Calls `f` with the child counts of every observed parent configuration.
    pub(crate) fn for_each_row(&self, mut f: impl FnMut(usize, &[u32])) {
        match self {
            Counts::Dense { r, table } => {
                for (j, row) in table.chunks(*r).enumerate() {
                    if row.iter().any(|&c| c > 0) {
                        f(j, row);
                    }
                }
            }
            Counts::Sparse { map } => {
                for (&j, row) in map {
                    f(j, row);
                }
            }
        }
    }
}

/// Maximised log-likelihood of the family, natural log.
pub fn family_log_likelihood(data: &DiscreteDataset, child: usize, parents: &[usize]) -> f64 {
    let mut ll = 0.0;
    family_counts(data, child, parents).for_each_row(|_, row| {
        let total: u32 = row.iter().sum();
        let total = f64::from(total);
        for &c in row {
            if c > 0 {
                let c = f64::from(c);
                ll += c * (c / total).ln();
            }
        }
    });
    ll
}

/// Free parameters of the family: `(r - 1) * prod(parent cardinalities)`.
pub fn family_parameters(data: &DiscreteDataset, child: usize, parents: &[usize]) -> f64 {
    let q: f64 = parents.iter().map(|&p| data.cardinality(p) as f64).product();
    (data.cardinality(child) as f64 - 1.0) * q
}

pub fn family_bic(data: &DiscreteDataset, child: usize, parents: &[usize]) -> f64 {
    let n = data.n_rows() as f64;
    family_log_likelihood(data, child, parents) - n.ln() / 2.0 * family_parameters(data, child, parents)
}

pub fn network_bic(data: &DiscreteDataset, dag: &Dag) -> f64 {
    (0..dag.len()).map(|i| family_bic(data, i, dag.parents(i))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(names: &[&str], cols: Vec<Vec<usize>>) -> DiscreteDataset {
        let k = names.len();
        DiscreteDataset::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![vec!["0".to_string(), "1".to_string()]; k],
            cols,
            None,
        )
        .unwrap()
    }

    #[test]
    fn uniform_binary_root() {
        let d = binary(&["X"], vec![vec![0, 1, 0, 1, 0, 1, 0, 1]]);
        let expected = 8.0 * 0.5f64.ln() - 8f64.ln() / 2.0;
        assert!((family_bic(&d, 0, &[]) - expected).abs() < 1e-12);
    }

    #[test]
    fn deterministic_child_has_zero_likelihood_loss() {
        let a = vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 1];
        let d = binary(&["A", "B"], vec![a.clone(), a]);
        assert!(family_log_likelihood(&d, 1, &[0]).abs() < 1e-12);
        let expected = -(10f64.ln()) / 2.0 * 2.0;
        assert!((family_bic(&d, 1, &[0]) - expected).abs() < 1e-12);
    }

    #[test]
    fn parent_order_does_not_matter() {
        let d = binary(&["A", "B", "C"], vec![vec![0, 1, 1, 0, 1, 0], vec![1, 1, 0, 0, 1, 0], vec![0, 1, 0, 1, 1, 1]]);
        assert!((family_bic(&d, 2, &[0, 1]) - family_bic(&d, 2, &[1, 0])).abs() < 1e-12);
    }
}
