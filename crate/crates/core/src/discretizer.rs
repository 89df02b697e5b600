//! Equal-frequency binning of the neighbourhood sample.
//!
//! Cut points are the empirical `q / quartiles` quantiles of each column
//! (linear interpolation between order statistics). Intervals are
//! right-closed: `(-inf, c1], (c1, c2], ..., (ck, +inf)`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::LabeledSample;

pub const DEFAULT_QUARTILES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureBins {
    pub feature: String,
    pub cuts: Vec<f64>,
    pub categories: Vec<String>,
}

impl FeatureBins {
    fn from_cuts(feature: String, cuts: Vec<f64>) -> Self {
        let categories = category_names(&cuts);
        Self { feature, cuts, categories }
    }

    /// Index of the bin holding `v`.
    pub fn bin(&self, v: f64) -> usize {
        self.cuts.partition_point(|&c| c < v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningScheme {
    pub quartiles: usize,
    pub features: Vec<FeatureBins>,
}

impl BinningScheme {
    /// Feature name to cut points, for report provenance.
    pub fn sidecar(&self) -> BTreeMap<String, Vec<f64>> {
        self.features.iter().map(|f| (f.feature.clone(), f.cuts.clone())).collect()
    }
}

fn category_names(cuts: &[f64]) -> Vec<String> {
    if cuts.is_empty() {
        return vec!["(-inf, +inf)".to_string()];
    }
    let mut names = Vec::with_capacity(cuts.len() + 1);
    names.push(format!("(-inf, {}]", cuts[0]));
    for w in cuts.windows(2) {
        names.push(format!("({}, {}]", w[0], w[1]));
    }
    names.push(format!("({}, +inf)", cuts[cuts.len() - 1]));
    names
}

/// Empirical quantile of sorted data, linear interpolation between order
/// statistics at position `(n - 1) p`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Quantile cut points, dropping any that would leave a bin empty on the
/// column itself (duplicates included).
fn column_cuts(column: &[f64], quartiles: usize) -> Vec<f64> {
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut cuts: Vec<f64> = Vec::new();
    for q in 1..quartiles {
        let c = quantile(&sorted, q as f64 / quartiles as f64);
        let lower = cuts.last().copied().unwrap_or(f64::NEG_INFINITY);
        let below = sorted.partition_point(|&v| v <= lower);
        let upto = sorted.partition_point(|&v| v <= c);
        if upto > below && upto < sorted.len() {
            cuts.push(c);
        }
    }
    cuts
}

pub fn fit_bins(s: &LabeledSample, quartiles: usize) -> Result<BinningScheme> {
    if quartiles < 2 {
        return Err(Error::Config(format!("quartiles must be at least 2, got {quartiles}")));
    }
    if s.is_empty() {
        return Err(Error::Config("cannot fit bins on an empty sample".into()));
    }
    let features = s
        .feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col: Vec<f64> = s.column(j).collect();
            FeatureBins::from_cuts(name.clone(), column_cuts(&col, quartiles))
        })
        .collect();
    Ok(BinningScheme { quartiles, features })
}

/// Categorical table: features first, then (optionally) the class variable.
/// Stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDataset {
    names: Vec<String>,
    alphabets: Vec<Vec<String>>,
    columns: Vec<Vec<usize>>,
    class: Option<usize>,
}

impl DiscreteDataset {
    pub fn new(
        names: Vec<String>,
        alphabets: Vec<Vec<String>>,
        columns: Vec<Vec<usize>>,
        class: Option<usize>,
    ) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Schema("no variables".into()));
        }
        if alphabets.len() != names.len() || columns.len() != names.len() {
            return Err(Error::Schema("names, alphabets and columns differ in length".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Schema(format!("duplicate variable `{dup}`")));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::Schema("no rows".into()));
        }
        for (i, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::Schema(format!("column `{}` has {} rows, expected {n}", names[i], col.len())));
            }
            if alphabets[i].is_empty() {
                return Err(Error::Schema(format!("variable `{}` has an empty alphabet", names[i])));
            }
            if col.iter().any(|&v| v >= alphabets[i].len()) {
                return Err(Error::Schema(format!("column `{}` leaves its alphabet", names[i])));
            }
        }
        if class.is_some_and(|c| c >= names.len()) {
            return Err(Error::Schema("class index out of range".into()));
        }
        Ok(Self { names, alphabets, columns, class })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn alphabet(&self, var: usize) -> &[String] {
        &self.alphabets[var]
    }

    pub fn cardinality(&self, var: usize) -> usize {
        self.alphabets[var].len()
    }

    pub fn column(&self, var: usize) -> &[usize] {
        &self.columns[var]
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn class_index(&self) -> Option<usize> {
        self.class
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.names)?;
        for r in 0..self.n_rows() {
            w.write_record(self.columns.iter().enumerate().map(|(i, c)| self.alphabets[i][c[r]].as_str()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Maps every sample value to its bin. The class column keeps its labels;
/// its alphabet is the observed labels in `label_order` order (labels not
/// listed there follow, sorted).
pub fn apply_bins(s: &LabeledSample, b: &BinningScheme, label_order: &[String]) -> Result<DiscreteDataset> {
    let mut names = Vec::with_capacity(s.feature_names.len() + 1);
    let mut alphabets = Vec::with_capacity(names.capacity());
    let mut columns = Vec::with_capacity(names.capacity());
    for fb in &b.features {
        let j = s
            .feature_names
            .iter()
            .position(|n| *n == fb.feature)
            .ok_or_else(|| Error::UnknownVariable(fb.feature.clone()))?;
        names.push(fb.feature.clone());
        alphabets.push(fb.categories.clone());
        columns.push(s.column(j).map(|v| fb.bin(v)).collect());
    }
    if let Some(missing) = s.feature_names.iter().find(|n| !names.contains(n)) {
        return Err(Error::UnknownVariable(missing.clone()));
    }

    let mut observed: Vec<String> = label_order.iter().filter(|l| s.labels.contains(l)).cloned().collect();
    let mut extra: Vec<String> = s.labels.iter().filter(|l| !label_order.contains(l)).cloned().collect();
    extra.sort();
    extra.dedup();
    observed.extend(extra);
    let class_col =
        s.labels.iter().map(|l| observed.iter().position(|o| o == l).expect("label is in the alphabet")).collect();
    names.push(s.class_name.clone());
    alphabets.push(observed);
    columns.push(class_col);
    let class = names.len() - 1;
    DiscreteDataset::new(names, alphabets, columns, Some(class))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(cols: &[Vec<f64>]) -> LabeledSample {
        let n = cols[0].len();
        let rows = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        let names = (1..=cols.len()).map(|i| format!("x{i}")).collect();
        let labels = (0..n).map(|r| if r % 2 == 0 { "pos" } else { "neg" }.to_string()).collect();
        LabeledSample::new(names, rows, labels, "class".into()).unwrap()
    }

    fn order() -> Vec<String> {
        vec!["pos".into(), "neg".into()]
    }

    #[test]
    fn constant_column_has_one_category() {
        let s = sample(&[vec![0.42; 300]]);
        let b = fit_bins(&s, 4).unwrap();
        assert!(b.features[0].cuts.is_empty());
        assert_eq!(b.features[0].categories.len(), 1);
        let d = apply_bins(&s, &b, &order()).unwrap();
        assert!(d.column(0).iter().all(|&v| v == 0));
    }

    #[test]
    fn repeated_grid_gives_four_categories() {
        // sorted column of 300: 75 copies each of 0, .25, .5, .75
        // positions (n-1)q/4 = 74.75, 149.5, 224.25 straddle the block edges
        // at 74|75, 149|150, 224|225 so the cuts interpolate inside each gap.
        let col: Vec<f64> = (0..300).map(|i| [0.0, 0.25, 0.5, 0.75][i % 4]).collect();
        let mut sorted = col.clone();
        sorted.sort_by(f64::total_cmp);
        let oracle: Vec<f64> = [0.25, 0.5, 0.75]
            .iter()
            .map(|p| {
                let h = 299.0 * p;
                let lo = h as usize;
                sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
            })
            .collect();
        assert_eq!(oracle, vec![0.1875, 0.375, 0.5625]);
        let b = fit_bins(&sample(&[col]), 4).unwrap();
        assert_eq!(b.features[0].cuts, oracle);
        assert_eq!(b.features[0].categories.len(), 4);
    }

    #[test]
    fn two_valued_column_merges() {
        let col: Vec<f64> = (0..100).map(|i| if i < 50 { 0.2 } else { 0.9 }).collect();
        let b = fit_bins(&sample(&[col]), 4).unwrap();
        assert!(b.features[0].categories.len() <= 2);
        assert_eq!(b.features[0].cuts, vec![0.2]);
    }

    #[test]
    fn right_closed_and_unbounded() {
        let fb = FeatureBins::from_cuts("x".into(), vec![0.25, 0.5]);
        assert_eq!(fb.bin(0.25), 0);
        assert_eq!(fb.bin(0.2500001), 1);
        assert_eq!(fb.bin(0.5), 1);
        assert_eq!(fb.bin(-3.0), 0);
        assert_eq!(fb.bin(7.0), 2);
        assert_eq!(fb.categories, vec!["(-inf, 0.25]", "(0.25, 0.5]", "(0.5, +inf)"]);
    }

    #[test]
    fn class_alphabet_follows_label_order() {
        let s = sample(&[vec![0.1, 0.2, 0.3]]);
        let d = apply_bins(&s, &fit_bins(&s, 4).unwrap(), &["neg".into(), "pos".into()]).unwrap();
        let c = d.class_index().unwrap();
        assert_eq!(d.alphabet(c), &["neg".to_string(), "pos".to_string()]);
        assert_eq!(d.column(c), &[1, 0, 1]);
        assert_eq!(d.n_rows(), 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = sample(&[vec![0.1, 0.2]]);
        assert!(fit_bins(&s, 1).is_err());
        let mut b = fit_bins(&s, 4).unwrap();
        b.features[0].feature = "zz".into();
        assert!(matches!(apply_bins(&s, &b, &order()), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn csv_uses_category_names() {
        let s = sample(&[vec![0.1, 0.9]]);
        let d = apply_bins(&s, &fit_bins(&s, 4).unwrap(), &order()).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x1,class\n"));
        // only the 0.25 quantile survives; the others would leave empty bins
        assert!(text.contains("\"(-inf, 0.3000"), "{text}");
        assert!(text.lines().nth(2).unwrap().ends_with("+inf)\",neg"));
    }
}
