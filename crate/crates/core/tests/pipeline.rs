use localbn::pipeline::{
    explain, render_report, render_report_with_depth, ExplainConfig, ExplanationReport, RenderFormat, ViewKind,
};
use localbn::predictor::{FeatureVector, MlpModel, Predictor, SyntheticKind, SyntheticModel};
use localbn::verdicts::{Rule, TopologyPattern};

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn linear(n: usize) -> SyntheticModel {
    let w: Vec<String> = (0..n).map(|i| if i < 3 { "1" } else { "0" }.to_string()).collect();
    SyntheticModel::new(SyntheticKind::parse(&format!("linear:{}:-1.5", w.join(","))).unwrap(), names(n)).unwrap()
}

#[test]
fn json_round_trip_is_byte_identical() {
    let x = FeatureVector::new(names(3), vec![0.5, 0.45, 0.55]).unwrap();
    let r = explain(&x, &linear(3), &ExplainConfig { seed: 3, ..Default::default() }).unwrap();
    let a = render_report(&r, RenderFormat::Json);
    let back = ExplanationReport::from_json(&a).unwrap();
    assert_eq!(back, r);
    assert_eq!(render_report(&back, RenderFormat::Json), a);
}

#[test]
fn isolated_class_dot_has_no_class_edges() {
    let m = SyntheticModel::new(SyntheticKind::Coin { seed: 4 }, names(3)).unwrap();
    let x = FeatureVector::new(names(3), vec![0.2, 0.4, 0.6]).unwrap();
    let r = explain(&x, &m, &ExplainConfig::default()).unwrap();
    assert_eq!(r.verdict.rule, Rule::Unreliable);
    assert_eq!(r.topology.pattern, TopologyPattern::Isolated);
    let dot = render_report(&r, RenderFormat::Dot);
    assert!(!dot.contains("-> \"class\""));
    assert!(!dot.contains("\"class\" ->"));
    assert!(dot.contains("peripheries=2"));
}

#[test]
fn text_names_the_rule_once() {
    let x = FeatureVector::new(names(3), vec![0.5, 0.5, 0.5]).unwrap();
    let r = explain(&x, &linear(3), &ExplainConfig::default()).unwrap();
    let text = render_report(&r, RenderFormat::Text);
    assert_eq!(text.matches(r.verdict.rule.name()).count(), 1);
    for other in Rule::ALL.iter().filter(|&&o| o != r.verdict.rule) {
        assert!(!text.contains(other.name()));
    }
    assert!("svg".parse::<RenderFormat>().is_err());
}

#[test]
fn wide_model_reports_the_blanket_view() {
    let x = FeatureVector::new(names(30), vec![0.5; 30]).unwrap();
    let r = explain(&x, &linear(30), &ExplainConfig::default()).unwrap();
    assert_eq!(r.view.kind, ViewKind::MarkovBlanket);
    assert_eq!(r.network.nodes.len(), 31);
    let mut expected: Vec<&str> = r.markov_blanket.members();
    expected.push("class");
    let mut got: Vec<&str> = r.view.nodes.iter().map(String::as_str).collect();
    expected.sort();
    got.sort();
    assert_eq!(got, expected);
    // a deeper view can only add nodes
    let deeper = render_report_with_depth(&r, RenderFormat::Json, 2).unwrap();
    let d2 = ExplanationReport::from_json(&deeper).unwrap();
    assert!(d2.view.nodes.len() >= r.view.nodes.len());
    assert_eq!(d2.config.blanket_depth, 2);
}

#[test]
fn dot_labels_carry_the_mode() {
    let x = FeatureVector::new(names(3), vec![0.5, 0.5, 0.5]).unwrap();
    let r = explain(&x, &linear(3), &ExplainConfig::default()).unwrap();
    let dot = render_report(&r, RenderFormat::Dot);
    let m = r.marginal("class").unwrap();
    let (state, p) = m.mode();
    assert!(dot.contains(&format!("class\\nP({state})={p:.4}")), "{dot}");
}

#[test]
fn mlp_weights_document_drives_the_pipeline() {
    // one dense softmax layer: logit(pos) - logit(neg) = 8 * (x1 - 0.5)
    let doc = r#"{
        "input_names": ["x1", "x2"],
        "output_labels": ["pos", "neg"],
        "layers": [{"weights": [[4.0, 0.0], [-4.0, 0.0]], "bias": [-2.0, 2.0], "activation": "softmax"}]
    }"#;
    let m = MlpModel::from_json(doc).unwrap();
    let far = FeatureVector::new(names(2), vec![0.95, 0.5]).unwrap();
    assert_eq!(m.predict_label(&far).unwrap(), "pos");
    let r = explain(&far, &m, &ExplainConfig { epsilon: 0.05, ..Default::default() }).unwrap();
    assert_eq!(r.verdict.rule, Rule::HighConfidence);
    assert!(r.model.starts_with("mlp"));
}

#[test]
fn same_seed_same_report_apart_from_timing() {
    let x = FeatureVector::new(names(4), vec![0.5, 0.4, 0.6, 0.1]).unwrap();
    let cfg = ExplainConfig { seed: 77, ..Default::default() };
    let mut a = explain(&x, &linear(4), &cfg).unwrap();
    let mut b = explain(&x, &linear(4), &cfg).unwrap();
    a.timing = Default::default();
    b.timing = Default::default();
    assert_eq!(a.to_json(), b.to_json());
}
