//! End-to-end explanation of single predictions, batch runs and epsilon
//! sweeps.

mod batch;
mod render;
mod report;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use batch::{
    batch_explain, confusion_cell, derive_seed, epsilon_sweep, BatchItem, CellSummary, ConfusionCell, EpsilonResult,
    RuleFrequencies, SweepCells, SweepSummary, TabularDataset,
};
pub use render::{render_report, render_report_with_depth, RenderFormat};
pub use report::{ConfigEcho, DisplayView, ExplanationReport, NodeMarginal, Prediction, Timing, ViewKind};

use crate::bn::{self, fit_parameters, hill_climb, SearchConfig, DEFAULT_ALPHA};
use crate::discretizer::{apply_bins, fit_bins, DEFAULT_QUARTILES};
use crate::error::{Error, Result};
use crate::inference::{all_marginals, blanket_closure, induced_edges, markov_blanket};
use crate::predictor::{
    BridgePredictor, ClassDistribution, FeatureVector, MlpModel, Predictor, SyntheticKind, SyntheticModel,
    DEFAULT_BRIDGE_TIMEOUT_MS,
};
use crate::sampler::{generate_permutations, label_histogram, LabeledSample, PermutationConfig};
use crate::verdicts::{classify_rule, validate_tau, ClassTopology, Rule, RuleVerdict, DEFAULT_TAU};

/// Networks with at most this many variables are shown in full; larger
/// ones are summarised by the class variable's Markov blanket.
pub const NODE_THRESHOLD: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplainConfig {
    pub class_var: String,
    pub epsilon: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub include_original: bool,
    pub quartiles: usize,
    pub tau: f64,
    pub max_parents: Option<usize>,
    pub max_iterations: usize,
    pub alpha: f64,
    pub node_threshold: usize,
    pub blanket_depth: usize,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        let perm = PermutationConfig::default();
        let search = SearchConfig::default();
        Self {
            class_var: "class".into(),
            epsilon: perm.epsilon,
            n_samples: perm.n_samples,
            seed: perm.seed,
            include_original: perm.include_original,
            quartiles: DEFAULT_QUARTILES,
            tau: DEFAULT_TAU,
            max_parents: search.max_parents,
            max_iterations: search.max_iterations,
            alpha: DEFAULT_ALPHA,
            node_threshold: NODE_THRESHOLD,
            blanket_depth: 1,
        }
    }
}

impl ExplainConfig {
    pub fn validate(&self) -> Result<()> {
        self.permutation().validate()?;
        self.search().validate()?;
        validate_tau(self.tau)?;
        if self.quartiles < 2 {
            return Err(Error::Config(format!("quartiles must be at least 2, got {}", self.quartiles)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        if self.class_var.is_empty() {
            return Err(Error::Config("class variable name is empty".into()));
        }
        if self.blanket_depth == 0 {
            return Err(Error::Config("blanket depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn permutation(&self) -> PermutationConfig {
        PermutationConfig {
            epsilon: self.epsilon,
            n_samples: self.n_samples,
            seed: self.seed,
            include_original: self.include_original,
        }
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig { max_parents: self.max_parents, max_iterations: self.max_iterations, ..SearchConfig::default() }
    }
}

/// Explains the black-box prediction at `x`.
///
/// Stages run in a fixed order: sample the neighbourhood, bin it, learn the
/// structure, fit the CPTs, compute marginals, take the class blanket, and
/// pick the rule.
pub fn explain(x: &FeatureVector, model: &dyn Predictor, cfg: &ExplainConfig) -> Result<ExplanationReport> {
    cfg.validate()?;
    let started = Instant::now();
    let distribution = model.predict(x)?;
    let sample = generate_permutations(x, model, &cfg.permutation(), &cfg.class_var)?;
    let sampling_ms = started.elapsed().as_secs_f64() * 1e3;
    let mut report = explain_sample(x, &distribution, &sample, &model.describe(), cfg)?;
    report.timing.sampling_ms = sampling_ms;
    report.timing.total_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Runs every stage after sampling on an existing labelled sample.
pub fn explain_sample(
    x: &FeatureVector,
    distribution: &ClassDistribution,
    sample: &LabeledSample,
    model_id: &str,
    cfg: &ExplainConfig,
) -> Result<ExplanationReport> {
    cfg.validate()?;
    if sample.class_name != cfg.class_var {
        return Err(Error::Config(format!(
            "sample class column `{}` differs from `{}`",
            sample.class_name, cfg.class_var
        )));
    }
    if sample.is_empty() {
        return Err(Error::Config("empty sample".into()));
    }
    let labels = distribution.labels();
    let predicted = distribution.argmax().to_string();

    let t0 = Instant::now();
    let bins = fit_bins(sample, cfg.quartiles)?;
    let data = apply_bins(sample, &bins, labels)?;
    let dag = hill_climb(&data, &cfg.search())?;
    let network = fit_parameters(&data, &dag, cfg.alpha)?;
    let learning_ms = t0.elapsed().as_secs_f64() * 1e3;

    let t1 = Instant::now();
    let marginals = all_marginals(&network)?;
    let blanket = markov_blanket(&dag, &cfg.class_var)?;
    let class_idx = dag.index_of(&cfg.class_var)?;
    let class_alphabet = network.alphabet(class_idx);
    let class_probs: Vec<f64> = labels
        .iter()
        .map(|l| class_alphabet.iter().position(|a| a == l).map_or(0.0, |k| marginals[class_idx][k]))
        .collect();
    let class_marginal = ClassDistribution::new(labels.to_vec(), class_probs)?;
    let degenerate = class_alphabet.len() == 1;
    let verdict = if degenerate {
        degenerate_verdict(&dag, cfg, &class_marginal, &predicted)?
    } else {
        classify_rule(&dag, &cfg.class_var, &class_marginal, &predicted, cfg.tau)?
    };
    let inference_ms = t1.elapsed().as_secs_f64() * 1e3;

    let node_marginals = marginals
        .iter()
        .enumerate()
        .map(|(v, p)| NodeMarginal {
            variable: network.dag().name(v).to_string(),
            states: network.alphabet(v).to_vec(),
            probabilities: p.clone(),
        })
        .collect();

    let view_kind = if dag.len() <= cfg.node_threshold { ViewKind::Full } else { ViewKind::MarkovBlanket };
    let display = display_view(&dag, view_kind, &cfg.class_var, cfg.blanket_depth)?;

    Ok(ExplanationReport {
        input: x.clone(),
        model: model_id.to_string(),
        prediction: Prediction { label: predicted, distribution: distribution.clone() },
        config: ConfigEcho::from_config(cfg),
        binning: bins.sidecar(),
        label_histogram: label_histogram(sample),
        degenerate_sample: degenerate,
        network: network.to_document(),
        markov_blanket: blanket,
        view: display,
        marginals: node_marginals,
        topology: verdict.topology,
        verdict,
        timing: Timing { sampling_ms: 0.0, learning_ms, inference_ms, total_ms: learning_ms + inference_ms },
    })
}

/// Verdict for a neighbourhood whose labels are all identical. Such a
/// sample is unanimous, so it is R1 when it agrees with the black box;
/// the class node is recorded as isolated.
fn degenerate_verdict(
    dag: &bn::Dag,
    cfg: &ExplainConfig,
    class_marginal: &ClassDistribution,
    predicted: &str,
) -> Result<RuleVerdict> {
    let c = dag.index_of(&cfg.class_var)?;
    let topology = ClassTopology::from_degrees(dag.parents(c).len(), dag.children(c).len());
    let agrees = class_marginal.probability(predicted).unwrap_or(0.0) >= 1.0 - 1e-12;
    Ok(RuleVerdict {
        rule: if agrees { Rule::HighConfidence } else { Rule::Contrast },
        predicted_label: predicted.to_string(),
        surrogate_argmax: class_marginal.argmax().to_string(),
        surrogate_posterior: class_marginal.clone(),
        threshold_used: cfg.tau,
        topology,
    })
}

pub(crate) fn display_view(dag: &bn::Dag, kind: ViewKind, class_var: &str, depth: usize) -> Result<DisplayView> {
    let keep = match kind {
        ViewKind::Full => (0..dag.len()).collect(),
        ViewKind::MarkovBlanket => blanket_closure(dag, class_var, depth)?,
    };
    Ok(DisplayView {
        kind,
        depth,
        nodes: keep.iter().map(|&v| dag.name(v).to_string()).collect(),
        edges: induced_edges(dag, &keep),
    })
}

/// Resolves a model argument: `cmd:<command>` starts a bridge process,
/// `synthetic:<spec>` builds an analytic classifier, anything else is a
/// weights document path.
pub fn load_model(spec: &str, input_names: &[String], labels: Option<Vec<String>>) -> Result<Box<dyn Predictor>> {
    if let Some(cmd) = spec.strip_prefix("cmd:") {
        return Ok(Box::new(BridgePredictor::spawn(cmd, input_names.to_vec(), labels, DEFAULT_BRIDGE_TIMEOUT_MS)?));
    }
    if let Some(s) = spec.strip_prefix("synthetic:") {
        let kind = SyntheticKind::parse(s)?;
        let model = match labels {
            Some(l) => SyntheticModel::with_labels(kind, input_names.to_vec(), l)?,
            None => SyntheticModel::new(kind, input_names.to_vec())?,
        };
        return Ok(Box::new(model));
    }
    let model = MlpModel::load(Path::new(spec))?;
    if model.input_names() != input_names {
        return Err(Error::FeatureMismatch { expected: model.input_names().to_vec(), got: input_names.to_vec() });
    }
    Ok(Box::new(model))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    fn threshold(n: usize) -> SyntheticModel {
        SyntheticModel::new(SyntheticKind::parse("threshold:x1:0.5").unwrap(), names(n)).unwrap()
    }

    #[test]
    fn defaults_match_the_reference_algorithm() {
        let c = ExplainConfig::default();
        assert_eq!((c.epsilon, c.n_samples, c.quartiles, c.node_threshold), (0.1, 300, 4, 10));
        assert_eq!((c.tau, c.max_parents, c.alpha), (0.95, Some(4), 1.0));
    }

    #[test]
    fn config_validation() {
        let bad = [
            ExplainConfig { epsilon: 1.5, ..Default::default() },
            ExplainConfig { n_samples: 0, ..Default::default() },
            ExplainConfig { quartiles: 1, ..Default::default() },
            ExplainConfig { tau: 0.4, ..Default::default() },
            ExplainConfig { alpha: -1.0, ..Default::default() },
            ExplainConfig { max_parents: Some(0), ..Default::default() },
            ExplainConfig { blanket_depth: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn far_point_is_high_confidence() {
        let x = FeatureVector::new(names(3), vec![0.9, 0.3, 0.6]).unwrap();
        let cfg = ExplainConfig { epsilon: 0.05, ..Default::default() };
        let r = explain(&x, &threshold(3), &cfg).unwrap();
        assert_eq!(r.verdict.rule, Rule::HighConfidence);
        assert_eq!(r.verdict.surrogate_posterior.probability("pos"), Some(1.0));
        assert!(r.degenerate_sample);
        assert_eq!(r.topology.pattern, crate::verdicts::TopologyPattern::Isolated);
        assert_eq!(r.view.kind, ViewKind::Full);
    }

    #[test]
    fn boundary_point_is_not_high_confidence() {
        let x = FeatureVector::new(names(3), vec![0.5, 0.3, 0.6]).unwrap();
        let cfg = ExplainConfig { epsilon: 0.1, seed: 21, ..Default::default() };
        let r = explain(&x, &threshold(3), &cfg).unwrap();
        assert!(matches!(r.verdict.rule, Rule::Contrast | Rule::Uncertain), "{:?}", r.verdict);
        // the learned graph links x1 and the class
        let mb = &r.markov_blanket;
        assert!(mb.members().contains(&"x1"));
    }

    #[test]
    fn explaining_the_serialized_sample_reproduces_the_result() {
        let x = FeatureVector::new(names(3), vec![0.52, 0.3, 0.6]).unwrap();
        let cfg = ExplainConfig { seed: 8, ..Default::default() };
        let model = threshold(3);
        let r = explain(&x, &model, &cfg).unwrap();
        let sample = generate_permutations(&x, &model, &cfg.permutation(), &cfg.class_var).unwrap();
        let mut buf = Vec::new();
        sample.write_csv(&mut buf).unwrap();
        let reread = LabeledSample::read_csv(&buf[..]).unwrap();
        let dist = model.predict(&x).unwrap();
        let again = explain_sample(&x, &dist, &reread, &model.describe(), &cfg).unwrap();
        assert_eq!(again.network, r.network);
        assert_eq!(again.verdict, r.verdict);
    }

    #[test]
    fn load_model_variants() {
        let n = names(2);
        assert!(load_model("synthetic:threshold:x1:0.5", &n, None).is_ok());
        assert!(load_model("synthetic:bogus", &n, None).is_err());
        assert!(load_model("/nonexistent/weights.json", &n, None).is_err());
    }
}
