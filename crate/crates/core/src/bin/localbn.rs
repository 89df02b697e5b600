use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use localbn::pipeline::{
    batch_explain, epsilon_sweep, explain, load_model, render_report, render_report_with_depth, ExplainConfig,
    ExplanationReport, RenderFormat, TabularDataset,
};
use localbn::predictor::{FeatureVector, Predictor};
use localbn::sampler::generate_permutations;
use localbn::{Error, Result};

#[derive(Parser)]
#[command(name = "localbn", version, about = "Explain single classifier predictions with local Bayesian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explain one prediction.
    Explain(ExplainArgs),
    /// Explain every row of a labelled dataset.
    Batch(BatchArgs),
    /// Rule frequencies per confusion cell over a list of epsilons.
    Sweep(SweepArgs),
    /// Re-render a saved JSON report.
    Render(RenderArgs),
    /// Answer bridge requests on stdin with a synthetic classifier.
    #[command(hide = true)]
    BridgeServe(ServeArgs),
}

#[derive(Args, Clone)]
struct Knobs {
    /// Weights JSON path, `synthetic:<spec>` or `cmd:<shell command>`.
    #[arg(long)]
    model: String,
    /// Comma-separated class labels (bridge and synthetic models).
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<String>>,
    #[arg(long, default_value = "class")]
    class_var: String,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 300)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop the unperturbed input from the sample.
    #[arg(long)]
    no_original: bool,
    #[arg(long, default_value_t = 4)]
    quartiles: usize,
    #[arg(long, default_value_t = 0.95)]
    tau: f64,
    /// Parent limit; 0 means unlimited.
    #[arg(long, default_value_t = 4)]
    max_parents: usize,
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 10)]
    node_threshold: usize,
    #[arg(long, default_value_t = 1)]
    depth: usize,
}

impl Knobs {
    fn config(&self) -> ExplainConfig {
        ExplainConfig {
            class_var: self.class_var.clone(),
            epsilon: self.epsilon,
            n_samples: self.samples,
            seed: self.seed,
            include_original: !self.no_original,
            quartiles: self.quartiles,
            tau: self.tau,
            max_parents: (self.max_parents > 0).then_some(self.max_parents),
            max_iterations: self.max_iterations,
            alpha: self.alpha,
            node_threshold: self.node_threshold,
            blanket_depth: self.depth,
        }
    }
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    knobs: Knobs,
    /// CSV file (header plus one row) or `name=value,...`.
    #[arg(long)]
    input: String,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the labelled neighbourhood as CSV.
    #[arg(long)]
    sample_out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    knobs: Knobs,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "label")]
    label_col: String,
    /// Defaults to the model's first label.
    #[arg(long)]
    positive_label: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    batch: BatchArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.3,0.5")]
    epsilons: Vec<f64>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    model: String,
    #[arg(long, value_delimiter = ',')]
    features: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Explain(a) => run_explain(a),
        Command::Batch(a) => run_batch(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Render(a) => run_render(a),
        Command::BridgeServe(a) => run_serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_input(arg: &str) -> Result<FeatureVector> {
    if Path::new(arg).is_file() {
        let mut r = csv::Reader::from_path(arg)?;
        let names: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let row = r.records().next().ok_or_else(|| Error::Schema(format!("{arg} has no data row")))??;
        let values = row
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| Error::Schema(format!("`{f}` is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        return FeatureVector::new(names, values);
    }
    let mut names = Vec::new();
    let mut values = Vec::new();
    for pair in arg.split(',') {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::Schema(format!("expected name=value, got `{pair}`")))?;
        names.push(k.trim().to_string());
        values.push(v.trim().parse().map_err(|_| Error::Schema(format!("`{v}` is not a number")))?);
    }
    FeatureVector::new(names, values)
}

fn run_explain(a: ExplainArgs) -> Result<()> {
    let format: RenderFormat = a.format.parse()?;
    let x = parse_input(&a.input)?;
    let model = load_model(&a.knobs.model, x.names(), a.knobs.labels.clone())?;
    let cfg = a.knobs.config();
    let report = explain(&x, model.as_ref(), &cfg)?;
    if let Some(p) = &a.sample_out {
        let sample = generate_permutations(&x, model.as_ref(), &cfg.permutation(), &cfg.class_var)?;
        sample.write_csv(fs::File::create(p)?)?;
    }
    emit(a.out.as_deref(), &render_report(&report, format))
}

fn load_dataset(a: &BatchArgs) -> Result<(TabularDataset, Box<dyn Predictor>, String)> {
    let data = TabularDataset::read_csv(fs::File::open(&a.dataset)?, &a.label_col)?;
    let model = load_model(&a.knobs.model, &data.feature_names, a.knobs.labels.clone())?;
    let positive = match &a.positive_label {
        Some(p) if model.labels().contains(p) => p.clone(),
        Some(p) => return Err(Error::Config(format!("positive label `{p}` is not a model label"))),
        None => model.labels()[0].clone(),
    };
    Ok((data, model, positive))
}

fn run_batch(a: BatchArgs) -> Result<()> {
    let (data, model, positive) = load_dataset(&a)?;
    let items = batch_explain(&data, model.as_ref(), &a.knobs.config(), &positive)?;
    let mut text = serde_json::to_string_pretty(&items)?;
    text.push('\n');
    emit(a.out.as_deref(), &text)
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    let (data, model, positive) = load_dataset(&a.batch)?;
    let id = a
        .batch
        .dataset
        .file_name()
        .map_or_else(|| a.batch.dataset.display().to_string(), |f| f.to_string_lossy().into_owned());
    let summary = epsilon_sweep(&data, &id, model.as_ref(), &a.epsilons, &a.batch.knobs.config(), &positive)?;
    emit(a.batch.out.as_deref(), &summary.to_json())
}

fn run_render(a: RenderArgs) -> Result<()> {
    let format: RenderFormat = a.format.parse()?;
    let report = ExplanationReport::from_json(&fs::read_to_string(&a.report)?)?;
    let text = match a.depth {
        Some(d) => render_report_with_depth(&report, format, d)?,
        None => render_report(&report, format),
    };
    emit(a.out.as_deref(), &text)
}

fn run_serve(a: ServeArgs) -> Result<()> {
    let model = load_model(&a.model, &a.features, None)?;
    let stdin = io::stdin();
    let mut stdout = io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let req: Value = serde_json::from_str(&line)?;
        let feats = req
            .get("features")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Protocol("request lacks a `features` object".into()))?;
        let values = a
            .features
            .iter()
            .map(|n| feats.get(n).and_then(Value::as_f64).ok_or_else(|| Error::Protocol(format!("missing `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        let dist = model.predict(&FeatureVector::new(a.features.clone(), values)?)?;
        let probs: Map<String, Value> =
            dist.labels().iter().zip(dist.probabilities()).map(|(l, p)| (l.clone(), Value::from(*p))).collect();
        writeln!(stdout, "{}", serde_json::json!({ "probabilities": probs }))?;
        stdout.flush()?;
    }
    Ok(())
}
