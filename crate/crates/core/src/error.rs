use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid feature vector: {0}")]
    InvalidFeatures(String),

    #[error("invalid class distribution: {0}")]
    InvalidDistribution(String),

    #[error("malformed weights document: {0}")]
    MalformedWeights(String),

    #[error("dimension mismatch in layer {layer}: {detail}")]
    DimensionMismatch { layer: usize, detail: String },

    #[error("unknown activation `{0}`")]
    UnknownActivation(String),

    #[error("feature names do not match the model inputs: expected {expected:?}, got {got:?}")]
    FeatureMismatch { expected: Vec<String>, got: Vec<String> },

    #[error("bridge protocol violation: {0}")]
    Protocol(String),

    #[error("bridge timed out after {0} ms")]
    Timeout(u64),

    #[error("prediction failed on sample row {row}: {source}")]
    RowPrediction {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown category `{category}` for variable `{variable}`")]
    UnknownCategory { variable: String, category: String },

    #[error("evidence has zero probability under the network")]
    ZeroProbabilityEvidence,

    #[error("joint table of {0} cells exceeds the enumeration guard")]
    JointTooLarge(u128),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown synthetic model `{0}`")]
    UnknownSynthetic(String),

    #[error("dataset schema mismatch: {0}")]
    Schema(String),

    #[error("unknown render format `{0}`")]
    UnknownFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
