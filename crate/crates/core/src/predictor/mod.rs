//! Black-box prediction interface.
//!
//! Every backend answers the same question: given a [`FeatureVector`] whose
//! names match the model inputs, what is the class distribution? The
//! explainer only ever consumes the argmax label.

mod bridge;
mod mlp;
mod synthetic;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bridge::{BridgePredictor, DEFAULT_BRIDGE_TIMEOUT_MS};
pub use mlp::{Activation, Layer, MlpModel};
pub(crate) use synthetic::splitmix64;
pub use synthetic::{SyntheticKind, SyntheticModel, DEFAULT_LABELS};

/// Named, ordered features on the unit interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidFeatures("no features".into()));
        }
        if names.len() != values.len() {
            return Err(Error::InvalidFeatures(format!("{} names but {} values", names.len(), values.len())));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::InvalidFeatures("empty feature name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidFeatures(format!("duplicate feature `{name}`")));
            }
        }
        for (name, v) in names.iter().zip(&values) {
            if !v.is_finite() || !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidFeatures(format!("feature `{name}` = {v} is outside [0, 1]")));
            }
        }
        Ok(Self { names, values })
    }

    /// Same names, new values. Values are validated.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.names.clone(), values)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// A probability distribution over an ordered set of class labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl ClassDistribution {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(labels: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::InvalidDistribution("need at least two labels".into()));
        }
        if labels.len() != probabilities.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probabilities.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidDistribution(format!("duplicate label `{l}`")));
            }
        }
        for (l, p) in labels.iter().zip(&probabilities) {
            if !p.is_finite() || !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidDistribution(format!("P({l}) = {p}")));
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self { labels, probabilities })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.probabilities[i])
    }

    /// Index of the most probable label; the first label wins exact ties.
    pub fn argmax_index(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate().skip(1) {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmax(&self) -> &str {
        &self.labels[self.argmax_index()]
    }
}

/// A black-box classifier.
///
/// Implementations must be deterministic in `x`.
pub trait Predictor: Send + Sync {
    fn input_names(&self) -> &[String];

    fn labels(&self) -> &[String];

    fn predict(&self, x: &FeatureVector) -> Result<ClassDistribution>;

    fn predict_label(&self, x: &FeatureVector) -> Result<String> {
        let dist = self.predict(x)?;
        Ok(dist.argmax().to_string())
    }

    /// Short identifier for reports.
    fn describe(&self) -> String;
}

pub(crate) fn check_names(expected: &[String], x: &FeatureVector) -> Result<()> {
    if expected != x.names() {
        return Err(Error::FeatureMismatch { expected: expected.to_vec(), got: x.names().to_vec() });
    }
    Ok(())
}

/// Numerically stable softmax.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
