//! Uniform epsilon-neighbourhood sampling around the explained point.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictor::{FeatureVector, Predictor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationConfig {
    /// Half-width of the per-feature sampling interval.
    pub epsilon: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub include_original: bool,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, n_samples: 300, seed: 0, include_original: true }
    }
}

impl PermutationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon {} is outside [0, 1]", self.epsilon)));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Perturbed copies of a datapoint with the black-box label of each row.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub class_name: String,
}

impl LabeledSample {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<String>,
        class_name: String,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Schema(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if feature_names.contains(&class_name) {
            return Err(Error::Config(format!("class variable `{class_name}` collides with a feature")));
        }
        if let Some(r) = rows.iter().position(|r| r.len() != feature_names.len()) {
            return Err(Error::Schema(format!("row {r} has {} values", rows[r].len())));
        }
        Ok(Self { feature_names, rows, labels, class_name })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[j])
    }

    /// Header is the feature names followed by the class column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.feature_names.clone();
        header.push(self.class_name.clone());
        w.write_record(&header)?;
        for (row, label) in self.rows.iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
            rec.push(label.clone());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the layout written by [`write_csv`](Self::write_csv); the last
    /// column is the class.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < 2 {
            return Err(Error::Schema("need at least one feature and a class column".into()));
        }
        let (features, class) = header.split_at(header.len() - 1);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .take(features.len())
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Schema(format!("bad number `{s}`"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            labels.push(rec.get(features.len()).unwrap_or_default().to_string());
        }
        Self::new(features.to_vec(), rows, labels, class[0].clone())
    }
}

/// Draws the neighbourhood of `x` and labels each row with `model`.
///
/// All random draws happen in one sequential pass; labelling may run in
/// parallel but row `i` always carries label `i`.
pub fn generate_permutations(
    x: &FeatureVector,
    model: &dyn Predictor,
    cfg: &PermutationConfig,
    class_name: &str,
) -> Result<LabeledSample> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bounds: Vec<(f64, f64)> =
        x.values().iter().map(|&v| ((v - cfg.epsilon).max(0.0), (v + cfg.epsilon).min(1.0))).collect();
    let mut rows = Vec::with_capacity(cfg.n_samples);
    if cfg.include_original {
        rows.push(x.values().to_vec());
    }
    while rows.len() < cfg.n_samples {
        let row: Vec<f64> =
            bounds.iter().map(|&(lo, hi)| if lo < hi { rng.random_range(lo..=hi) } else { lo }).collect();
        rows.push(row);
    }

    let labels: Vec<Result<String>> = rows
        .par_iter()
        .map(|row| {
            let fv = x.with_values(row.clone())?;
            model.predict_label(&fv)
        })
        .collect();
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(row, l)| l.map_err(|e| Error::RowPrediction { row, source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;

    LabeledSample::new(x.names().to_vec(), rows, labels, class_name.to_string())
}

pub fn label_histogram(s: &LabeledSample) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for l in &s.labels {
        *h.entry(l.clone()).or_insert(0) += 1;
    }
    h
}
