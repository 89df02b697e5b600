mod common;

use approx::assert_abs_diff_eq;
use common::{binary_rows, coins, oracle_family_bic, oracle_network_bic, v_structure};
use localbn::bn::{
    family_bic, fit_parameters, hill_climb, hill_climb_traced, network_bic, Dag, Operator, SearchConfig,
};
use localbn::discretizer::DiscreteDataset;
use localbn::testkit::{all_dags, random_network};
use proptest::prelude::*;

fn best_by_enumeration(data: &DiscreteDataset) -> (Dag, f64) {
    all_dags(data.names())
        .into_iter()
        .map(|d| {
            let s = oracle_network_bic(data, &d);
            (d, s)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

fn replay(names: &[String], trace: &localbn::bn::SearchTrace) -> Vec<Dag> {
    let mut d = Dag::empty(names.to_vec());
    let mut out = vec![d.clone()];
    for s in &trace.steps {
        match s.mv.op {
            Operator::Add => d.add_edge(s.mv.parent, s.mv.child).unwrap(),
            Operator::Remove => d.remove_edge(s.mv.parent, s.mv.child).unwrap(),
            Operator::Reverse => d.reverse_edge(s.mv.parent, s.mv.child).unwrap(),
        }
        out.push(d.clone());
    }
    out
}

#[test]
fn three_node_dag_count() {
    assert_eq!(all_dags(&common::names(&["A", "B", "C"])).len(), 25);
    assert_eq!(all_dags(&common::names(&["A", "B"])).len(), 3);
}

#[test]
fn v_structure_is_recovered_and_is_the_enumeration_optimum() {
    let data = v_structure().sample(10_000, 11).unwrap();
    let learned = hill_climb(&data, &SearchConfig::default()).unwrap();
    let (best, best_score) = best_by_enumeration(&data);
    assert_eq!(learned.edges(), vec![(0, 2), (1, 2)]);
    assert_eq!(best.edges(), learned.edges());
    assert_abs_diff_eq!(network_bic(&data, &learned), best_score, epsilon = 1e-9);
}

#[test]
fn independent_coins_give_the_empty_graph() {
    for k in [2, 3] {
        let data = coins(k).sample(10_000, 5).unwrap();
        let learned = hill_climb(&data, &SearchConfig::default()).unwrap();
        assert_eq!(learned.edge_count(), 0);
        assert_eq!(best_by_enumeration(&data).0.edge_count(), 0);
    }
}

#[test]
fn hand_computed_family_scores() {
    let rows: Vec<Vec<usize>> = (0..8).map(|i| vec![i % 2]).collect();
    let d = binary_rows(&["A"], &rows);
    assert_abs_diff_eq!(family_bic(&d, 0, &[]), 8.0 * 0.5f64.ln() - 8f64.ln() / 2.0, epsilon = 1e-12);

    let rows: Vec<Vec<usize>> = (0..20).map(|i| vec![i % 2, i % 2]).collect();
    let d = binary_rows(&["P", "C"], &rows);
    assert_abs_diff_eq!(family_bic(&d, 1, &[0]), -(20f64.ln()) / 2.0 * 2.0, epsilon = 1e-12);
}

#[test]
fn irrelevant_parent_lowers_the_score() {
    let data = coins(2).sample(10_000, 99).unwrap();
    assert!(family_bic(&data, 1, &[0]) < family_bic(&data, 1, &[]));
}

#[test]
fn enumeration_optimum_on_small_random_data() {
    for seed in 0..10 {
        let bn = random_network(seed, 3, 2, 0.6);
        let data = bn.sample(200, seed + 100).unwrap();
        let trace = hill_climb_traced(&data, &SearchConfig::default()).unwrap();
        let (_, best) = best_by_enumeration(&data);
        // greedy search may stop at a local optimum, never above the global one
        assert!(trace.final_score() <= best + 1e-9);
        // and no single move from the result improves it
        for d in all_dags(data.names()) {
            let diff = d.edges().iter().filter(|e| !trace.dag.has_edge(e.0, e.1)).count()
                + trace.dag.edges().iter().filter(|e| !d.has_edge(e.0, e.1)).count();
            if diff <= 1 || (diff == 2 && d.edge_count() == trace.dag.edge_count() && is_reversal(&d, &trace.dag)) {
                assert!(oracle_network_bic(&data, &d) <= trace.final_score() + 1e-9);
            }
        }
    }
}

fn is_reversal(a: &Dag, b: &Dag) -> bool {
    let only_a: Vec<_> = a.edges().into_iter().filter(|e| !b.has_edge(e.0, e.1)).collect();
    let only_b: Vec<_> = b.edges().into_iter().filter(|e| !a.has_edge(e.0, e.1)).collect();
    only_a.len() == 1 && only_b.len() == 1 && only_a[0] == (only_b[0].1, only_b[0].0)
}

#[test]
fn cpt_rows_sum_to_one_after_fitting() {
    let bn = random_network(4, 5, 4, 0.5);
    let data = bn.sample(500, 1).unwrap();
    let dag = hill_climb(&data, &SearchConfig::default()).unwrap();
    let fitted = fit_parameters(&data, &dag, 1.0).unwrap();
    for cpt in fitted.cpts() {
        for row in cpt.rows() {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
            assert!(row.iter().all(|&p| p > 0.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_invariants(seed in 0u64..10_000, n_vars in 2usize..6, rows in 50usize..400) {
        let bn = random_network(seed, n_vars, 3, 0.5);
        let data = bn.sample(rows, seed ^ 0xABCD).unwrap();
        let cfg = SearchConfig::default();
        let trace = hill_climb_traced(&data, &cfg).unwrap();
        let dags = replay(data.names(), &trace);
        prop_assert!((network_bic(&data, &dags[0]) - trace.initial_score).abs() < 1e-9);
        for (i, step) in trace.steps.iter().enumerate() {
            prop_assert!(step.gain > 0.0);
            let d = &dags[i + 1];
            prop_assert!(d.is_acyclic());
            prop_assert!((0..d.len()).all(|v| d.parents(v).len() <= 4));
            let scratch = network_bic(&data, d);
            prop_assert!((scratch - step.score).abs() < 1e-9, "step {i}: {scratch} vs {}", step.score);
            let prev = if i == 0 { trace.initial_score } else { trace.steps[i - 1].score };
            prop_assert!(step.score > prev);
        }
        prop_assert_eq!(&trace.dag, dags.last().unwrap());
        let again = hill_climb(&data, &cfg).unwrap();
        prop_assert_eq!(again.edges(), trace.dag.edges());
    }

    #[test]
    fn network_score_decomposes(seed in 0u64..10_000) {
        let bn = random_network(seed, 5, 4, 0.4);
        let data = bn.sample(300, seed).unwrap();
        let other = random_network(seed + 1, 5, 2, 0.5);
        let dag = other.dag();
        let total: f64 = (0..dag.len()).map(|v| oracle_family_bic(&data, v, dag.parents(v))).sum();
        prop_assert!((network_bic(&data, dag) - total).abs() < 1e-9);
    }
}
