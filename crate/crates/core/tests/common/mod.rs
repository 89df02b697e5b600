#![allow(dead_code)]

use std::collections::HashMap;

use localbn::bn::{BayesianNetwork, Cpt, Dag};
use localbn::discretizer::DiscreteDataset;

pub fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn binary() -> Vec<String> {
    names(&["0", "1"])
}

/// X1 -> Y <- X2 with uniform roots and P(Y=1 | x1, x2) = 0.05, 0.5, 0.6, 0.95.
pub fn v_structure() -> BayesianNetwork {
    let dag = Dag::from_named_edges(names(&["X1", "X2", "Y"]), &[("X1", "Y"), ("X2", "Y")]).unwrap();
    let p1 = [0.05, 0.5, 0.6, 0.95];
    let y_table: Vec<f64> = p1.iter().flat_map(|&p| [1.0 - p, p]).collect();
    let cpts = vec![
        Cpt { child: 0, parents: vec![], cardinality: 2, table: vec![0.5, 0.5] },
        Cpt { child: 1, parents: vec![], cardinality: 2, table: vec![0.5, 0.5] },
        Cpt { child: 2, parents: vec![0, 1], cardinality: 2, table: y_table },
    ];
    BayesianNetwork::new(dag, vec![binary(); 3], cpts).unwrap()
}

/// `k` fair, independent coins named C0, C1, ...
pub fn coins(k: usize) -> BayesianNetwork {
    let n: Vec<String> = (0..k).map(|i| format!("C{i}")).collect();
    let cpts = (0..k).map(|v| Cpt { child: v, parents: vec![], cardinality: 2, table: vec![0.5, 0.5] }).collect();
    BayesianNetwork::new(Dag::empty(n), vec![binary(); k], cpts).unwrap()
}

/// Family BIC straight from the definition: a hash count over rows, MLE
/// log-likelihood with 0 log 0 = 0, and a (ln n)/2 penalty per free parameter.
pub fn oracle_family_bic(data: &DiscreteDataset, child: usize, parents: &[usize]) -> f64 {
    let n = data.n_rows();
    let mut joint: HashMap<(Vec<usize>, usize), f64> = HashMap::new();
    let mut marg: HashMap<Vec<usize>, f64> = HashMap::new();
    for r in 0..n {
        let key: Vec<usize> = parents.iter().map(|&p| data.column(p)[r]).collect();
        *joint.entry((key.clone(), data.column(child)[r])).or_default() += 1.0;
        *marg.entry(key).or_default() += 1.0;
    }
    let ll: f64 = joint.iter().map(|((k, _), &c)| c * (c / marg[k]).ln()).sum();
    let q: usize = parents.iter().map(|&p| data.cardinality(p)).product();
    let params = ((data.cardinality(child) - 1) * q) as f64;
    ll - (n as f64).ln() / 2.0 * params
}

pub fn oracle_network_bic(data: &DiscreteDataset, dag: &Dag) -> f64 {
    (0..dag.len()).map(|v| oracle_family_bic(data, v, dag.parents(v))).sum()
}

/// Dataset from explicit rows of category indices over binary variables.
pub fn binary_rows(var_names: &[&str], rows: &[Vec<usize>]) -> DiscreteDataset {
    let cols = (0..var_names.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    DiscreteDataset::new(names(var_names), vec![binary(); var_names.len()], cols, None).unwrap()
}
