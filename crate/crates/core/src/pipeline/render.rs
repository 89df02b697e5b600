use std::fmt::Write as _;
use std::str::FromStr;

use super::{display_view, DisplayView, ExplanationReport};
use crate::bn::{dot_id, BayesianNetwork};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Json,
    Dot,
    Text,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "dot" => Ok(Self::Dot),
            "text" => Ok(Self::Text),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

pub fn render_report(report: &ExplanationReport, format: RenderFormat) -> String {
    match format {
        RenderFormat::Json => report.to_json(),
        RenderFormat::Dot => render_dot(report, &report.view),
        RenderFormat::Text => render_text(report, &report.view),
    }
}

/// Renders with a different blanket depth. Full-network views ignore it.
pub fn render_report_with_depth(report: &ExplanationReport, format: RenderFormat, depth: usize) -> Result<String> {
    if depth == 0 {
        return Err(Error::Config("blanket depth must be at least 1".into()));
    }
    let bn = BayesianNetwork::from_document(&report.network)?;
    let view = display_view(bn.dag(), report.view.kind, &report.config.class_var, depth)?;
    let mut r = report.clone();
    r.view = view;
    r.config.blanket_depth = depth;
    Ok(render_report(&r, format))
}

fn dot_label(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render_dot(report: &ExplanationReport, view: &DisplayView) -> String {
    let class = &report.config.class_var;
    let mut out = String::from("digraph explanation {\n  node [shape=ellipse];\n");
    for node in &view.nodes {
        let mut attrs = String::new();
        if let Some(m) = report.marginal(node) {
            let (state, p) = m.mode();
            let label = format!("{}\\nP({})={:.4}", dot_label(node), dot_label(state), p);
            let _ = write!(attrs, "label=\"{label}\"");
        }
        if node == class {
            if !attrs.is_empty() {
                attrs.push_str(", ");
            }
            attrs.push_str("peripheries=2");
        }
        let _ = writeln!(out, "  {} [{}];", dot_id(node), attrs);
    }
    for (p, c) in &view.edges {
        let _ = writeln!(out, "  {} -> {};", dot_id(p), dot_id(c));
    }
    out.push_str("}\n");
    out
}

fn render_text(report: &ExplanationReport, view: &DisplayView) -> String {
    let v = &report.verdict;
    let mut out = String::new();
    let _ = writeln!(out, "Black-box prediction: {} ({})", report.prediction.label, report.model);
    let _ = writeln!(out, "Verdict: {}", v.rule);
    let posterior: Vec<String> = v
        .surrogate_posterior
        .labels()
        .iter()
        .zip(v.surrogate_posterior.probabilities())
        .map(|(l, p)| format!("{l}={p:.4}"))
        .collect();
    let _ = writeln!(out, "Surrogate class posterior: {} (argmax {})", posterior.join(", "), v.surrogate_argmax);
    let _ = writeln!(out, "Confidence threshold: {}", v.threshold_used);
    let _ = writeln!(
        out,
        "Class topology: {} (in-degree {}, out-degree {})",
        v.topology.pattern, v.topology.in_degree, v.topology.out_degree
    );
    let mb = &report.markov_blanket;
    let list = |xs: &[String]| if xs.is_empty() { "-".to_string() } else { xs.join(", ") };
    let _ = writeln!(out, "Markov blanket of {}:", mb.target);
    let _ = writeln!(out, "  parents:  {}", list(&mb.parents));
    let _ = writeln!(out, "  children: {}", list(&mb.children));
    let _ = writeln!(out, "  spouses:  {}", list(&mb.spouses));
    let hist: Vec<String> = report.label_histogram.iter().map(|(l, n)| format!("{l}={n}")).collect();
    let _ = writeln!(
        out,
        "Neighbourhood: {} samples, epsilon {}, labels {}",
        report.config.n_samples,
        report.config.epsilon,
        hist.join(", ")
    );
    let kind = match view.kind {
        super::ViewKind::Full => "full network".to_string(),
        super::ViewKind::MarkovBlanket => format!("Markov blanket (depth {})", view.depth),
    };
    let _ = writeln!(out, "View: {kind}, {} nodes, {} edges", view.nodes.len(), view.edges.len());
    for node in &view.nodes {
        if let Some(m) = report.marginal(node) {
            let (state, p) = m.mode();
            let _ = writeln!(out, "  {node}: P({state})={p:.4}");
        }
    }
    out
}
