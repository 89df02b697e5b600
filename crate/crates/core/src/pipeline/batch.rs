use std::fmt;
use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{explain, ConfigEcho, ExplainConfig, ExplanationReport};
use crate::error::{Error, Result};
use crate::predictor::splitmix64;
use crate::predictor::{FeatureVector, Predictor};
use crate::verdicts::Rule;

/// Feature table with a ground-truth label per row.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularDataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl TabularDataset {
    /// Reads a headed CSV; `label_col` names the ground-truth column and every
    /// other column is a feature scaled to [0, 1].
    pub fn read_csv<R: Read>(input: R, label_col: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let label_idx = header
            .iter()
            .position(|h| h == label_col)
            .ok_or_else(|| Error::Schema(format!("label column `{label_col}` not found")))?;
        let feature_names: Vec<String> =
            header.iter().enumerate().filter(|(i, _)| *i != label_idx).map(|(_, h)| h.clone()).collect();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::Schema(format!("row {line} has {} fields, expected {}", rec.len(), header.len())));
            }
            let mut row = Vec::with_capacity(feature_names.len());
            for (i, field) in rec.iter().enumerate() {
                if i == label_idx {
                    labels.push(field.trim().to_string());
                    continue;
                }
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Schema(format!("row {line}, column `{}`: `{field}` is not a number", header[i]))
                })?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Schema(format!("row {line}, column `{}`: {v} is outside [0, 1]", header[i])));
                }
                row.push(v);
            }
            rows.push(row);
        }
        Ok(Self { feature_names, rows, labels })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn point(&self, i: usize) -> Result<FeatureVector> {
        FeatureVector::new(self.feature_names.clone(), self.rows[i].clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfusionCell {
    TP,
    TN,
    FP,
    FN,
}

impl fmt::Display for ConfusionCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn confusion_cell(truth: &str, predicted: &str, positive: &str) -> ConfusionCell {
    match (truth == positive, predicted == positive) {
        (true, true) => ConfusionCell::TP,
        (false, false) => ConfusionCell::TN,
        (false, true) => ConfusionCell::FP,
        (true, false) => ConfusionCell::FN,
    }
}

/// Seed for the `index`-th run under `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchItem {
    pub row: usize,
    pub truth: String,
    pub predicted: String,
    pub cell: ConfusionCell,
    pub report: ExplanationReport,
}

/// Explains every row; row `i` uses seed `derive_seed(cfg.seed, i)`. Rows
/// may run in parallel; the output keeps input order.
pub fn batch_explain(
    dataset: &TabularDataset,
    model: &dyn Predictor,
    cfg: &ExplainConfig,
    positive_label: &str,
) -> Result<Vec<BatchItem>> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Ok(Vec::new());
    }
    if dataset.feature_names != model.input_names() {
        return Err(Error::Schema(format!(
            "dataset features {:?} do not match model inputs {:?}",
            dataset.feature_names,
            model.input_names()
        )));
    }
    let results: Vec<Result<BatchItem>> = (0..dataset.len())
        .into_par_iter()
        .map(|i| {
            let x = dataset.point(i)?;
            let row_cfg = ExplainConfig { seed: derive_seed(cfg.seed, i as u64), ..cfg.clone() };
            let report = explain(&x, model, &row_cfg)?;
            let truth = dataset.labels[i].clone();
            let predicted = report.prediction.label.clone();
            Ok(BatchItem { row: i, cell: confusion_cell(&truth, &predicted, positive_label), truth, predicted, report })
        })
        .collect();
    results.into_iter().collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleFrequencies {
    #[serde(rename = "R1_high_confidence")]
    pub r1: f64,
    #[serde(rename = "R2_unreliable")]
    pub r2: f64,
    #[serde(rename = "R3_contrast")]
    pub r3: f64,
    #[serde(rename = "R4_uncertain")]
    pub r4: f64,
}

impl RuleFrequencies {
    pub fn get(&self, rule: Rule) -> f64 {
        match rule {
            Rule::HighConfidence => self.r1,
            Rule::Unreliable => self.r2,
            Rule::Contrast => self.r3,
            Rule::Uncertain => self.r4,
        }
    }

    fn bump(&mut self, rule: Rule) {
        match rule {
            Rule::HighConfidence => self.r1 += 1.0,
            Rule::Unreliable => self.r2 += 1.0,
            Rule::Contrast => self.r3 += 1.0,
            Rule::Uncertain => self.r4 += 1.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2 + self.r3 + self.r4
    }
}

/// Rule counts and frequencies of the points in one confusion cell.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub count: usize,
    pub empty: bool,
    pub counts: RuleFrequencies,
    pub frequencies: RuleFrequencies,
}

impl CellSummary {
    fn from_rules(rules: impl Iterator<Item = Rule>) -> Self {
        let mut counts = RuleFrequencies::default();
        let mut n = 0;
        for r in rules {
            counts.bump(r);
            n += 1;
        }
        let frequencies = if n == 0 {
            RuleFrequencies::default()
        } else {
            let d = n as f64;
            RuleFrequencies { r1: counts.r1 / d, r2: counts.r2 / d, r3: counts.r3 / d, r4: counts.r4 / d }
        };
        Self { count: n, empty: n == 0, counts, frequencies }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepCells {
    #[serde(rename = "TP")]
    pub tp: CellSummary,
    #[serde(rename = "TN")]
    pub tn: CellSummary,
    #[serde(rename = "FP")]
    pub fp: CellSummary,
    #[serde(rename = "FN")]
    pub fn_: CellSummary,
}

impl SweepCells {
    pub fn get(&self, cell: ConfusionCell) -> &CellSummary {
        match cell {
            ConfusionCell::TP => &self.tp,
            ConfusionCell::TN => &self.tn,
            ConfusionCell::FP => &self.fp,
            ConfusionCell::FN => &self.fn_,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonResult {
    pub epsilon: f64,
    pub seed: u64,
    pub overall: CellSummary,
    pub cells: SweepCells,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub dataset: String,
    pub model: String,
    pub seed: u64,
    pub positive_label: String,
    pub n_points: usize,
    pub config: ConfigEcho,
    pub epsilons: Vec<f64>,
    pub results: Vec<EpsilonResult>,
}

impl SweepSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Runs [`batch_explain`] once per epsilon, with the `k`-th run seeded by
/// `derive_seed(cfg.seed, k)`, and tallies rules per confusion cell.
pub fn epsilon_sweep(
    dataset: &TabularDataset,
    dataset_id: &str,
    model: &dyn Predictor,
    epsilons: &[f64],
    cfg: &ExplainConfig,
    positive_label: &str,
) -> Result<SweepSummary> {
    if epsilons.is_empty() {
        return Err(Error::Config("no epsilon values given".into()));
    }
    if let Some(e) = epsilons.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::Config(format!("epsilon {e} is outside [0, 1]")));
    }
    let mut results = Vec::with_capacity(epsilons.len());
    for (k, &epsilon) in epsilons.iter().enumerate() {
        let seed = derive_seed(cfg.seed, k as u64);
        let run_cfg = ExplainConfig { epsilon, seed, ..cfg.clone() };
        let items = batch_explain(dataset, model, &run_cfg, positive_label)?;
        let of = |cell: ConfusionCell| {
            CellSummary::from_rules(items.iter().filter(|i| i.cell == cell).map(|i| i.report.verdict.rule))
        };
        results.push(EpsilonResult {
            epsilon,
            seed,
            overall: CellSummary::from_rules(items.iter().map(|i| i.report.verdict.rule)),
            cells: SweepCells {
                tp: of(ConfusionCell::TP),
                tn: of(ConfusionCell::TN),
                fp: of(ConfusionCell::FP),
                fn_: of(ConfusionCell::FN),
            },
        });
    }
    Ok(SweepSummary {
        dataset: dataset_id.to_string(),
        model: model.describe(),
        seed: cfg.seed,
        positive_label: positive_label.to_string(),
        n_points: dataset.len(),
        config: ConfigEcho::from_config(cfg),
        epsilons: epsilons.to_vec(),
        results,
    })
}
