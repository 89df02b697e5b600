use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_names, softmax, ClassDistribution, FeatureVector, Predictor};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Softmax,
}

impl Activation {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "relu" => Ok(Self::Relu),
            "softmax" => Ok(Self::Softmax),
            other => Err(Error::UnknownActivation(other.to_string())),
        }
    }
}

/// Dense layer; `weights` is row-major `[out][in]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn inputs(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn outputs(&self) -> usize {
        self.weights.len()
    }

    fn forward(&self, input: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect();
        match self.activation {
            Activation::Relu => z.into_iter().map(|v| v.max(0.0)).collect(),
            Activation::Softmax => softmax(&z),
        }
    }
}

// Wire form of the weights document.
#[derive(Serialize, Deserialize)]
struct WeightsDocument {
    input_names: Vec<String>,
    output_labels: Vec<String>,
    layers: Vec<LayerDocument>,
}

#[derive(Serialize, Deserialize)]
struct LayerDocument {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: String,
}

/// A feed-forward classifier evaluated in-process.
#[derive(Clone, Debug)]
pub struct MlpModel {
    layers: Vec<Layer>,
    input_names: Vec<String>,
    output_labels: Vec<String>,
}

impl MlpModel {
    pub fn new(layers: Vec<Layer>, input_names: Vec<String>, output_labels: Vec<String>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::MalformedWeights("no layers".into()));
        }
        if input_names.is_empty() {
            return Err(Error::MalformedWeights("no input names".into()));
        }
        if output_labels.len() < 2 {
            return Err(Error::MalformedWeights("need at least two output labels".into()));
        }
        let mut width = input_names.len();
        for (i, layer) in layers.iter().enumerate() {
            if layer.outputs() == 0 {
                return Err(Error::DimensionMismatch { layer: i, detail: "empty weight matrix".into() });
            }
            if let Some((r, row)) = layer.weights.iter().enumerate().find(|(_, row)| row.len() != width) {
                return Err(Error::DimensionMismatch {
                    layer: i,
                    detail: format!("row {r} has {} columns, expected {width}", row.len()),
                });
            }
            if layer.bias.len() != layer.outputs() {
                return Err(Error::DimensionMismatch {
                    layer: i,
                    detail: format!("bias has {} entries, expected {}", layer.bias.len(), layer.outputs()),
                });
            }
            if layer.weights.iter().flatten().chain(&layer.bias).any(|v| !v.is_finite()) {
                return Err(Error::MalformedWeights(format!("layer {i} has non-finite values")));
            }
            width = layer.outputs();
        }
        let last = layers.len() - 1;
        if layers[last].activation != Activation::Softmax {
            return Err(Error::MalformedWeights("final activation must be softmax".into()));
        }
        if width != output_labels.len() {
            return Err(Error::DimensionMismatch {
                layer: last,
                detail: format!("{width} outputs but {} labels", output_labels.len()),
            });
        }
        Ok(Self { layers, input_names, output_labels })
    }

    /// Parses and validates a weights document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WeightsDocument = serde_json::from_str(text).map_err(|e| Error::MalformedWeights(e.to_string()))?;
        let layers = doc
            .layers
            .into_iter()
            .map(|l| Ok(Layer { weights: l.weights, bias: l.bias, activation: Activation::parse(&l.activation)? }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers, doc.input_names, doc.output_labels)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let doc = WeightsDocument {
            input_names: self.input_names.clone(),
            output_labels: self.output_labels.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| LayerDocument {
                    weights: l.weights.clone(),
                    bias: l.bias.clone(),
                    activation: match l.activation {
                        Activation::Relu => "relu".into(),
                        Activation::Softmax => "softmax".into(),
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("weights document serializes")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.layers.iter().fold(input.to_vec(), |acc, layer| layer.forward(&acc))
    }
}

impl Predictor for MlpModel {
    fn input_names(&self) -> &[String] {
        &self.input_names
    }

    fn labels(&self) -> &[String] {
        &self.output_labels
    }

    fn predict(&self, x: &FeatureVector) -> Result<ClassDistribution> {
        check_names(&self.input_names, x)?;
        ClassDistribution::new(self.output_labels.clone(), self.forward(x.values()))
    }

    fn describe(&self) -> String {
        let widths: Vec<String> = self.layers.iter().map(|l| l.outputs().to_string()).collect();
        format!("mlp:{}->{}", self.input_names.len(), widths.join("->"))
    }
}
