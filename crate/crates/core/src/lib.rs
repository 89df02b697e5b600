//! Local Bayesian-network surrogates for single predictions of tabular
//! classifiers.
//!
//! A prediction is explained by sampling a uniform neighbourhood around the
//! input, labelling it with the black box, discretising the features into
//! quantile bins, learning a discrete network by BIC hill climbing, and
//! reading a confidence rule off the class node's neighbourhood.
//!
//! ```
//! use localbn::pipeline::{explain, ExplainConfig};
//! use localbn::predictor::{FeatureVector, SyntheticKind, SyntheticModel};
//!
//! let names = vec!["x1".to_string(), "x2".to_string()];
//! let model = SyntheticModel::new(SyntheticKind::parse("threshold:x1:0.5").unwrap(), names.clone()).unwrap();
//! let x = FeatureVector::new(names, vec![0.9, 0.2]).unwrap();
//! let report = explain(&x, &model, &ExplainConfig { epsilon: 0.05, ..Default::default() }).unwrap();
//! assert_eq!(report.verdict.rule.name(), "R1_high_confidence");
//! ```

pub mod bn;
pub mod discretizer;
pub mod error;
pub mod inference;
pub mod pipeline;
pub mod predictor;
pub mod sampler;
pub mod testkit;
pub mod verdicts;

pub use error::{Error, Result};
pub use pipeline::{explain, ExplainConfig, ExplanationReport};
pub use verdicts::Rule;
