//! C ABI over `localbn`.
//!
//! Models and reports are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`LbnStatus`]; on failure the
//! message is available from [`lbn_last_error`] on the same thread.
//! Strings handed out by the library are freed with [`lbn_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use localbn::pipeline::{explain, load_model, render_report, ExplainConfig, ExplanationReport, RenderFormat};
use localbn::predictor::{FeatureVector, Predictor};
use localbn::{Error, Rule};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LbnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    InvalidConfig = 4,
    Model = 5,
    Bridge = 6,
    Inference = 7,
    Io = 8,
    Parse = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LbnRule {
    HighConfidence = 1,
    Unreliable = 2,
    Contrast = 3,
    Uncertain = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LbnFormat {
    Json = 0,
    Dot = 1,
    Text = 2,
}

/// Explanation knobs. The class variable is always named `class`.
/// `max_parents == 0` means no in-degree limit.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LbnConfig {
    pub epsilon: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub include_original: bool,
    pub quartiles: usize,
    pub tau: f64,
    pub max_parents: usize,
    pub max_iterations: usize,
    pub alpha: f64,
    pub node_threshold: usize,
    pub blanket_depth: usize,
}

impl From<&ExplainConfig> for LbnConfig {
    fn from(c: &ExplainConfig) -> Self {
        Self {
            epsilon: c.epsilon,
            n_samples: c.n_samples,
            seed: c.seed,
            include_original: c.include_original,
            quartiles: c.quartiles,
            tau: c.tau,
            max_parents: c.max_parents.unwrap_or(0),
            max_iterations: c.max_iterations,
            alpha: c.alpha,
            node_threshold: c.node_threshold,
            blanket_depth: c.blanket_depth,
        }
    }
}

impl From<&LbnConfig> for ExplainConfig {
    fn from(c: &LbnConfig) -> Self {
        Self {
            epsilon: c.epsilon,
            n_samples: c.n_samples,
            seed: c.seed,
            include_original: c.include_original,
            quartiles: c.quartiles,
            tau: c.tau,
            max_parents: (c.max_parents > 0).then_some(c.max_parents),
            max_iterations: c.max_iterations,
            alpha: c.alpha,
            node_threshold: c.node_threshold,
            blanket_depth: c.blanket_depth,
            ..ExplainConfig::default()
        }
    }
}

/// Opaque classifier handle.
pub struct LbnModel {
    inner: Box<dyn Predictor>,
}

/// Opaque explanation handle.
pub struct LbnReport {
    inner: ExplanationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LbnStatus {
    match e {
        Error::InvalidFeatures(_) | Error::FeatureMismatch { .. } | Error::Schema(_) => LbnStatus::InvalidInput,
        Error::Config(_) | Error::UnknownFormat(_) => LbnStatus::InvalidConfig,
        Error::MalformedWeights(_)
        | Error::DimensionMismatch { .. }
        | Error::UnknownActivation(_)
        | Error::UnknownSynthetic(_)
        | Error::InvalidDistribution(_)
        | Error::RowPrediction { .. } => LbnStatus::Model,
        Error::Protocol(_) | Error::Timeout(_) => LbnStatus::Bridge,
        Error::UnknownVariable(_)
        | Error::UnknownCategory { .. }
        | Error::ZeroProbabilityEvidence
        | Error::JointTooLarge(_)
        | Error::InvalidGraph(_) => LbnStatus::Inference,
        Error::Io(_) => LbnStatus::Io,
        Error::Json(_) | Error::Csv(_) => LbnStatus::Parse,
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's
/// last-error message.
fn guard(f: impl FnOnce() -> Result<(), (LbnStatus, String)>) -> LbnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LbnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LbnStatus::Panic
        }
    }
}

fn lift(e: Error) -> (LbnStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (LbnStatus, String) {
    (LbnStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LbnStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (LbnStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lbn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn lbn_config_default() -> LbnConfig {
    LbnConfig::from(&ExplainConfig::default())
}

/// Loads a classifier. `spec` is a weights JSON path, `synthetic:<spec>` or
/// `cmd:<shell command>`; `input_names` lists the `n_inputs` feature names.
///
/// # Safety
/// `spec` and every entry of `input_names` must be NUL-terminated strings;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lbn_model_load(
    spec: *const c_char,
    input_names: *const *const c_char,
    n_inputs: usize,
    out: *mut *mut LbnModel,
) -> LbnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = read_str(spec, "spec")?;
        if input_names.is_null() && n_inputs > 0 {
            return Err(null("input_names"));
        }
        let names = (0..n_inputs)
            .map(|i| read_str(*input_names.add(i), "input name").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let inner = load_model(spec, &names, None).map_err(lift)?;
        *out = Box::into_raw(Box::new(LbnModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`lbn_model_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lbn_model_free(model: *mut LbnModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbn_model_n_inputs(model: *const LbnModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.input_names().len())
}

/// Explains the prediction at `values` (length `n_values`, in the model's
/// input order). A null `config` means the defaults.
///
/// # Safety
/// `model` must be live, `values` must hold `n_values` doubles, and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn lbn_explain(
    model: *const LbnModel,
    values: *const f64,
    n_values: usize,
    config: *const LbnConfig,
    out: *mut *mut LbnReport,
) -> LbnStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if values.is_null() && n_values > 0 {
            return Err(null("values"));
        }
        let vals = if n_values == 0 { Vec::new() } else { std::slice::from_raw_parts(values, n_values).to_vec() };
        let cfg = config.as_ref().map_or_else(ExplainConfig::default, ExplainConfig::from);
        let x = FeatureVector::new(model.inner.input_names().to_vec(), vals).map_err(lift)?;
        let inner = explain(&x, model.inner.as_ref(), &cfg).map_err(lift)?;
        *out = Box::into_raw(Box::new(LbnReport { inner }));
        Ok(())
    })
}

/// Parses a JSON report produced by [`lbn_report_render`] or the CLI.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lbn_report_from_json(json: *const c_char, out: *mut *mut LbnReport) -> LbnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = ExplanationReport::from_json(read_str(json, "json")?).map_err(lift)?;
        *out = Box::into_raw(Box::new(LbnReport { inner }));
        Ok(())
    })
}

/// # Safety
/// `report` must be live and `out` writable. Free the result with
/// [`lbn_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lbn_report_render(
    report: *const LbnReport,
    format: LbnFormat,
    out: *mut *mut c_char,
) -> LbnStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = match format {
            LbnFormat::Json => RenderFormat::Json,
            LbnFormat::Dot => RenderFormat::Dot,
            LbnFormat::Text => RenderFormat::Text,
        };
        *out = into_c_string(render_report(&r.inner, f));
        Ok(())
    })
}

/// # Safety
/// `report` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lbn_report_rule(report: *const LbnReport, out: *mut LbnRule) -> LbnStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match r.inner.verdict.rule {
            Rule::HighConfidence => LbnRule::HighConfidence,
            Rule::Unreliable => LbnRule::Unreliable,
            Rule::Contrast => LbnRule::Contrast,
            Rule::Uncertain => LbnRule::Uncertain,
        };
        Ok(())
    })
}

/// Surrogate posterior of the black box's predicted label.
///
/// # Safety
/// `report` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lbn_report_posterior(report: *const LbnReport, out: *mut f64) -> LbnStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let v = &r.inner.verdict;
        *out = v.surrogate_posterior.probability(&v.predicted_label).unwrap_or(0.0);
        Ok(())
    })
}

/// Black-box predicted label. Free the result with [`lbn_string_free`].
///
/// # Safety
/// `report` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lbn_report_predicted_label(report: *const LbnReport, out: *mut *mut c_char) -> LbnStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(r.inner.prediction.label.clone());
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lbn_report_free(report: *mut LbnReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn lbn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let c = lbn_config_default();
        assert_eq!((c.epsilon, c.n_samples, c.quartiles, c.max_parents), (0.1, 300, 4, 4));
        assert_eq!(ExplainConfig::from(&c), ExplainConfig::default());
        let unlimited = LbnConfig { max_parents: 0, ..c };
        assert_eq!(ExplainConfig::from(&unlimited).max_parents, None);
    }

    #[test]
    fn panics_become_a_status() {
        assert_eq!(guard(|| panic!("boom")), LbnStatus::Panic);
        let msg = unsafe { CStr::from_ptr(lbn_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&Error::Timeout(5)), LbnStatus::Bridge);
        assert_eq!(status_of(&Error::Config("x".into())), LbnStatus::InvalidConfig);
        assert_eq!(status_of(&Error::ZeroProbabilityEvidence), LbnStatus::Inference);
    }
}
