//! Analytic classifiers with known decision boundaries, used as test black boxes.

use super::{check_names, ClassDistribution, FeatureVector, Predictor};
use crate::error::{Error, Result};

/// Positive label first.
pub const DEFAULT_LABELS: [&str; 2] = ["pos", "neg"];

#[derive(Clone, Debug, PartialEq)]
pub enum SyntheticKind {
    /// `pos` iff `x[feature] >= cut`.
    Threshold { feature: String, cut: f64 },
    /// `pos` iff `weights . x + bias >= 0`.
    Linear { weights: Vec<f64>, bias: f64 },
    /// Label drawn from a fair coin keyed on `(seed, x)`; carries no
    /// information about the input.
    Coin { seed: u64 },
    /// Always the given label.
    Constant { label: String },
}

impl SyntheticKind {
    /// Parses `threshold:<feature>:<cut>`, `linear:<w1,w2,...>:<bias>`,
    /// `coin:<seed>` or `constant:<label>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::UnknownSynthetic(spec.to_string());
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            ["threshold", feature, cut] => {
                Ok(Self::Threshold { feature: feature.to_string(), cut: cut.parse().map_err(|_| bad())? })
            }
            ["linear", weights, bias] => Ok(Self::Linear {
                weights: weights
                    .split(',')
                    .map(|w| w.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?,
                bias: bias.parse().map_err(|_| bad())?,
            }),
            ["coin", seed] => Ok(Self::Coin { seed: seed.parse().map_err(|_| bad())? }),
            ["constant", label] => Ok(Self::Constant { label: label.to_string() }),
            _ => Err(bad()),
        }
    }

    pub fn spec(&self) -> String {
        match self {
            Self::Threshold { feature, cut } => format!("threshold:{feature}:{cut}"),
            Self::Linear { weights, bias } => {
                let w: Vec<String> = weights.iter().map(f64::to_string).collect();
                format!("linear:{}:{bias}", w.join(","))
            }
            Self::Coin { seed } => format!("coin:{seed}"),
            Self::Constant { label } => format!("constant:{label}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticModel {
    kind: SyntheticKind,
    input_names: Vec<String>,
    labels: Vec<String>,
    feature_index: Option<usize>,
}

impl SyntheticModel {
    pub fn new(kind: SyntheticKind, input_names: Vec<String>) -> Result<Self> {
        Self::with_labels(kind, input_names, DEFAULT_LABELS.iter().map(|s| s.to_string()).collect())
    }

    /// The first label plays the positive role.
    pub fn with_labels(kind: SyntheticKind, input_names: Vec<String>, labels: Vec<String>) -> Result<Self> {
        if input_names.is_empty() {
            return Err(Error::Config("synthetic model needs at least one input".into()));
        }
        if labels.len() != 2 || labels[0] == labels[1] {
            return Err(Error::Config("synthetic model needs two distinct labels".into()));
        }
        let mut feature_index = None;
        match &kind {
            SyntheticKind::Threshold { feature, .. } => {
                feature_index = Some(
                    input_names
                        .iter()
                        .position(|n| n == feature)
                        .ok_or_else(|| Error::UnknownVariable(feature.clone()))?,
                );
            }
            SyntheticKind::Linear { weights, .. } => {
                if weights.len() != input_names.len() {
                    return Err(Error::Config(format!(
                        "linear model has {} weights for {} inputs",
                        weights.len(),
                        input_names.len()
                    )));
                }
            }
            SyntheticKind::Constant { label } => {
                if !labels.contains(label) {
                    return Err(Error::Config(format!("constant label `{label}` is not a model label")));
                }
            }
            SyntheticKind::Coin { .. } => {}
        }
        Ok(Self { kind, input_names, labels, feature_index })
    }

    pub fn kind(&self) -> &SyntheticKind {
        &self.kind
    }

    /// Signed margin `weights . x + bias` (linear models only).
    pub fn linear_margin(&self, values: &[f64]) -> Option<f64> {
        match &self.kind {
            SyntheticKind::Linear { weights, bias } => {
                Some(weights.iter().zip(values).map(|(w, v)| w * v).sum::<f64>() + bias)
            }
            _ => None,
        }
    }

    /// Chebyshev (infinity-norm) distance from `values` to the linear boundary.
    pub fn linear_boundary_distance(&self, values: &[f64]) -> Option<f64> {
        match &self.kind {
            SyntheticKind::Linear { weights, .. } => {
                let l1: f64 = weights.iter().map(|w| w.abs()).sum();
                self.linear_margin(values).map(|m| m.abs() / l1)
            }
            _ => None,
        }
    }

    fn is_positive(&self, values: &[f64]) -> bool {
        match &self.kind {
            SyntheticKind::Threshold { cut, .. } => values[self.feature_index.unwrap()] >= *cut,
            SyntheticKind::Linear { .. } => self.linear_margin(values).unwrap() >= 0.0,
            SyntheticKind::Coin { seed } => {
                let mut h = splitmix64(*seed);
                for v in values {
                    h = splitmix64(h ^ v.to_bits());
                }
                h >> 63 == 1
            }
            SyntheticKind::Constant { label } => *label == self.labels[0],
        }
    }
}

impl Predictor for SyntheticModel {
    fn input_names(&self) -> &[String] {
        &self.input_names
    }

    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn predict(&self, x: &FeatureVector) -> Result<ClassDistribution> {
        check_names(&self.input_names, x)?;
        let probs = if self.is_positive(x.values()) { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
        ClassDistribution::new(self.labels.clone(), probs)
    }

    fn describe(&self) -> String {
        format!("synthetic:{}", self.kind.spec())
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn threshold_classifier() {
        let m = SyntheticModel::new(SyntheticKind::parse("threshold:x1:0.5").unwrap(), names(2)).unwrap();
        let x = FeatureVector::new(names(2), vec![0.7, 0.1]).unwrap();
        assert_eq!(m.predict(&x).unwrap().probability("pos"), Some(1.0));
        let x = FeatureVector::new(names(2), vec![0.3, 0.9]).unwrap();
        assert_eq!(m.predict_label(&x).unwrap(), "neg");
    }

    #[test]
    fn parse_round_trips() {
        for spec in ["threshold:x1:0.5", "linear:1,-1:0.25", "coin:7", "constant:neg"] {
            assert_eq!(SyntheticKind::parse(spec).unwrap().spec(), spec);
        }
        assert!(SyntheticKind::parse("spline:3").is_err());
        assert!(SyntheticKind::parse("linear:a,b:0").is_err());
    }

    #[test]
    fn linear_distance_is_chebyshev() {
        let m = SyntheticModel::new(SyntheticKind::parse("linear:1,1:-1").unwrap(), names(2)).unwrap();
        // moving both coordinates by d changes the margin by 2d
        let d = m.linear_boundary_distance(&[0.6, 0.6]).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn coin_is_deterministic_and_balanced() {
        let m = SyntheticModel::new(SyntheticKind::Coin { seed: 11 }, names(1)).unwrap();
        let mut pos = 0;
        for i in 0..2000 {
            let x = FeatureVector::new(names(1), vec![i as f64 / 2000.0]).unwrap();
            let a = m.predict_label(&x).unwrap();
            assert_eq!(a, m.predict_label(&x).unwrap());
            if a == "pos" {
                pos += 1;
            }
        }
        assert!((900..1100).contains(&pos), "{pos}");
    }

    #[test]
    fn constant_and_bad_configs() {
        let m = SyntheticModel::new(SyntheticKind::Constant { label: "neg".into() }, names(2)).unwrap();
        let x = FeatureVector::new(names(2), vec![0.7, 0.1]).unwrap();
        assert_eq!(m.predict_label(&x).unwrap(), "neg");
        assert!(SyntheticModel::new(SyntheticKind::Constant { label: "maybe".into() }, names(2)).is_err());
        assert!(SyntheticModel::new(SyntheticKind::parse("threshold:z:0.5").unwrap(), names(2)).is_err());
        assert!(SyntheticModel::new(SyntheticKind::parse("linear:1:0").unwrap(), names(2)).is_err());
    }
}
