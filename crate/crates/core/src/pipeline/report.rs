use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ExplainConfig;
use crate::bn::{NetworkDocument, MIN_IMPROVEMENT};
use crate::error::Result;
use crate::inference::MarkovBlanket;
use crate::predictor::{ClassDistribution, FeatureVector};
use crate::verdicts::{ClassTopology, RuleVerdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub distribution: ClassDistribution,
}

/// Every knob that influenced the result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub class_var: String,
    pub epsilon: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub include_original: bool,
    pub sampling: String,
    pub quartiles: usize,
    pub quantile_convention: String,
    pub interval_closure: String,
    pub score: String,
    pub search: String,
    pub max_parents: Option<usize>,
    pub max_iterations: usize,
    pub min_improvement: f64,
    pub alpha: f64,
    pub tau: f64,
    pub node_threshold: usize,
    pub blanket_depth: usize,
}

impl ConfigEcho {
    pub fn from_config(cfg: &ExplainConfig) -> Self {
        Self {
            class_var: cfg.class_var.clone(),
            epsilon: cfg.epsilon,
            n_samples: cfg.n_samples,
            seed: cfg.seed,
            include_original: cfg.include_original,
            sampling: "independent uniform per feature on [x - eps, x + eps] intersected with [0, 1]".into(),
            quartiles: cfg.quartiles,
            quantile_convention: "linear interpolation between order statistics".into(),
            interval_closure: "right-closed".into(),
            score: "BIC, natural log, unsmoothed counts".into(),
            search: "greedy hill climbing from the empty graph; add/remove/reverse".into(),
            max_parents: cfg.max_parents,
            max_iterations: cfg.max_iterations,
            min_improvement: MIN_IMPROVEMENT,
            alpha: cfg.alpha,
            tau: cfg.tau,
            node_threshold: cfg.node_threshold,
            blanket_depth: cfg.blanket_depth,
        }
    }

    pub fn to_config(&self) -> ExplainConfig {
        ExplainConfig {
            class_var: self.class_var.clone(),
            epsilon: self.epsilon,
            n_samples: self.n_samples,
            seed: self.seed,
            include_original: self.include_original,
            quartiles: self.quartiles,
            tau: self.tau,
            max_parents: self.max_parents,
            max_iterations: self.max_iterations,
            alpha: self.alpha,
            node_threshold: self.node_threshold,
            blanket_depth: self.blanket_depth,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewKind {
    Full,
    MarkovBlanket,
}

/// The subgraph meant for a human reader.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplayView {
    pub kind: ViewKind,
    pub depth: usize,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeMarginal {
    pub variable: String,
    pub states: Vec<String>,
    pub probabilities: Vec<f64>,
}

impl NodeMarginal {
    /// Most probable state; first state wins ties.
    pub fn mode(&self) -> (&str, f64) {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        (&self.states[best], self.probabilities[best])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub sampling_ms: f64,
    pub learning_ms: f64,
    pub inference_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplanationReport {
    pub input: FeatureVector,
    pub model: String,
    pub prediction: Prediction,
    pub config: ConfigEcho,
    /// Feature name to bin cut points.
    pub binning: BTreeMap<String, Vec<f64>>,
    pub label_histogram: BTreeMap<String, usize>,
    pub degenerate_sample: bool,
    /// The full learned network, whatever the view.
    pub network: NetworkDocument,
    pub markov_blanket: MarkovBlanket,
    pub view: DisplayView,
    pub marginals: Vec<NodeMarginal>,
    pub topology: ClassTopology,
    pub verdict: RuleVerdict,
    pub timing: Timing,
}

impl ExplanationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn marginal(&self, variable: &str) -> Option<&NodeMarginal> {
        self.marginals.iter().find(|m| m.variable == variable)
    }
}
