//! Fixtures shared by unit, integration and acceptance tests.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bn::{BayesianNetwork, Cpt, Dag};

/// Random network with `n_vars` variables, cardinalities in `2..=max_card`,
/// each forward edge `i -> j` (i < j) present with probability `edge_p`,
/// and CPT rows drawn from a flat Dirichlet.
pub fn random_network(seed: u64, n_vars: usize, max_card: usize, edge_p: f64) -> BayesianNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..n_vars).map(|i| format!("V{i}")).collect();
    // random relabelling so that edges do not always point up the index order
    let mut perm: Vec<usize> = (0..n_vars).collect();
    for i in (1..n_vars).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut dag = Dag::empty(names);
    for i in 0..n_vars {
        for j in i + 1..n_vars {
            if rng.random::<f64>() < edge_p {
                dag.add_edge(perm[i], perm[j]).expect("forward edges cannot cycle");
            }
        }
    }
    let alphabets: Vec<Vec<String>> = (0..n_vars)
        .map(|_| {
            let k = rng.random_range(2..=max_card.max(2));
            (0..k).map(|c| format!("s{c}")).collect()
        })
        .collect();
    let cpts = (0..n_vars)
        .map(|v| {
            let parents = dag.parents(v).to_vec();
            let r = alphabets[v].len();
            let q: usize = parents.iter().map(|&p| alphabets[p].len()).product();
            let mut table = Vec::with_capacity(q * r);
            for _ in 0..q {
                let raw: Vec<f64> = (0..r).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let s: f64 = raw.iter().sum();
                table.extend(raw.into_iter().map(|x| x / s));
            }
            Cpt { child: v, parents, cardinality: r, table }
        })
        .collect();
    BayesianNetwork::new(dag, alphabets, cpts).expect("generated network is valid")
}

/// Every DAG over `names`, by trying each of the three states (absent,
/// forward, backward) of every unordered pair. Use for up to four nodes.
pub fn all_dags(names: &[String]) -> Vec<Dag> {
    let n = names.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    'outer: for code in 0..total {
        let mut dag = Dag::empty(names.to_vec());
        let mut c = code;
        for &(i, j) in &pairs {
            let state = c % 3;
            c /= 3;
            let res = match state {
                1 => dag.add_edge(i, j),
                2 => dag.add_edge(j, i),
                _ => Ok(()),
            };
            if res.is_err() {
                continue 'outer;
            }
        }
        out.push(dag);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_nodes_have_25_dags() {
        let names: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        assert_eq!(all_dags(&names).len(), 25);
        assert_eq!(all_dags(&names[..2]).len(), 3);
    }

    #[test]
    fn random_networks_are_valid_and_reproducible() {
        for seed in 0..20 {
            let a = random_network(seed, 5, 4, 0.5);
            assert_eq!(a, random_network(seed, 5, 4, 0.5));
            assert!(a.dag().is_acyclic());
        }
    }
}
