//! Class-node topology and the four confidence rules.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bn::Dag;
use crate::error::{Error, Result};
use crate::predictor::ClassDistribution;

pub const DEFAULT_TAU: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyPattern {
    /// Features point into the class.
    CommonEffect,
    /// The class points out to features.
    CommonCause,
    Mixed,
    Isolated,
}

impl fmt::Display for TopologyPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CommonEffect => "common_effect",
            Self::CommonCause => "common_cause",
            Self::Mixed => "mixed",
            Self::Isolated => "isolated",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTopology {
    pub pattern: TopologyPattern,
    pub in_degree: usize,
    pub out_degree: usize,
}

impl ClassTopology {
    pub fn from_degrees(in_degree: usize, out_degree: usize) -> Self {
        let pattern = match (in_degree, out_degree) {
            (0, 0) => TopologyPattern::Isolated,
            (_, 0) => TopologyPattern::CommonEffect,
            (0, _) => TopologyPattern::CommonCause,
            _ => TopologyPattern::Mixed,
        };
        Self { pattern, in_degree, out_degree }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "R1_high_confidence")]
    HighConfidence,
    #[serde(rename = "R2_unreliable")]
    Unreliable,
    #[serde(rename = "R3_contrast")]
    Contrast,
    #[serde(rename = "R4_uncertain")]
    Uncertain,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::HighConfidence, Rule::Unreliable, Rule::Contrast, Rule::Uncertain];

    pub fn name(self) -> &'static str {
        match self {
            Rule::HighConfidence => "R1_high_confidence",
            Rule::Unreliable => "R2_unreliable",
            Rule::Contrast => "R3_contrast",
            Rule::Uncertain => "R4_uncertain",
        }
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleVerdict {
    pub rule: Rule,
    pub predicted_label: String,
    pub surrogate_argmax: String,
    pub surrogate_posterior: ClassDistribution,
    pub threshold_used: f64,
    pub topology: ClassTopology,
}

pub fn classify_topology(dag: &Dag, class_var: &str) -> Result<ClassTopology> {
    let c = dag.index_of(class_var)?;
    Ok(ClassTopology::from_degrees(dag.parents(c).len(), dag.children(c).len()))
}

pub fn validate_tau(tau: f64) -> Result<()> {
    if !(tau > 0.5 && tau <= 1.0) {
        return Err(Error::Config(format!("tau must lie in (0.5, 1], got {tau}")));
    }
    Ok(())
}

/// Rule decision from a topology, evaluated in order:
/// isolated class → R2; surrogate argmax disagrees with the black box → R3;
/// `P(predicted) >= tau` → R1; otherwise R4. A tie for the maximum that
/// includes the predicted label counts as agreement.
pub fn decide_rule(
    topology: &ClassTopology,
    class_marginal: &ClassDistribution,
    predicted_label: &str,
    tau: f64,
) -> Rule {
    if topology.pattern == TopologyPattern::Isolated {
        return Rule::Unreliable;
    }
    let max = class_marginal.probabilities()[class_marginal.argmax_index()];
    let p = class_marginal.probability(predicted_label).unwrap_or(0.0);
    if p < max {
        Rule::Contrast
    } else if p >= tau {
        Rule::HighConfidence
    } else {
        Rule::Uncertain
    }
}

pub fn classify_rule(
    dag: &Dag,
    class_var: &str,
    class_marginal: &ClassDistribution,
    predicted_label: &str,
    tau: f64,
) -> Result<RuleVerdict> {
    validate_tau(tau)?;
    let topology = classify_topology(dag, class_var)?;
    Ok(RuleVerdict {
        rule: decide_rule(&topology, class_marginal, predicted_label, tau),
        predicted_label: predicted_label.to_string(),
        surrogate_argmax: class_marginal.argmax().to_string(),
        surrogate_posterior: class_marginal.clone(),
        threshold_used: tau,
        topology,
    })
}
