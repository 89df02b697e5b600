use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use localbn_ffi::*;

fn load(spec: &str, names: &[&str]) -> (LbnStatus, *mut LbnModel) {
    let spec = CString::new(spec).unwrap();
    let owned: Vec<CString> = names.iter().map(|n| CString::new(*n).unwrap()).collect();
    let ptrs: Vec<*const c_char> = owned.iter().map(|c| c.as_ptr()).collect();
    let mut model = ptr::null_mut();
    let status = unsafe { lbn_model_load(spec.as_ptr(), ptrs.as_ptr(), ptrs.len(), &mut model) };
    (status, model)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lbn_last_error()) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { lbn_string_free(p) };
    s
}

#[test]
fn explain_render_and_free() {
    let (status, model) = load("synthetic:threshold:x1:0.5", &["x1", "x2"]);
    assert_eq!(status, LbnStatus::Ok);
    assert_eq!(unsafe { lbn_model_n_inputs(model) }, 2);

    let cfg = LbnConfig { epsilon: 0.05, ..lbn_config_default() };
    let x = [0.9, 0.4];
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { lbn_explain(model, x.as_ptr(), 2, &cfg, &mut report) }, LbnStatus::Ok);

    let mut rule = LbnRule::Uncertain;
    assert_eq!(unsafe { lbn_report_rule(report, &mut rule) }, LbnStatus::Ok);
    assert_eq!(rule, LbnRule::HighConfidence);
    let mut p = 0.0;
    assert_eq!(unsafe { lbn_report_posterior(report, &mut p) }, LbnStatus::Ok);
    assert_eq!(p, 1.0);
    let mut label = ptr::null_mut();
    assert_eq!(unsafe { lbn_report_predicted_label(report, &mut label) }, LbnStatus::Ok);
    assert_eq!(take_string(label), "pos");

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lbn_report_render(report, LbnFormat::Json, &mut json) }, LbnStatus::Ok);
    let json = take_string(json);
    let mut again = ptr::null_mut();
    let c = CString::new(json.clone()).unwrap();
    assert_eq!(unsafe { lbn_report_from_json(c.as_ptr(), &mut again) }, LbnStatus::Ok);
    let mut json2 = ptr::null_mut();
    assert_eq!(unsafe { lbn_report_render(again, LbnFormat::Json, &mut json2) }, LbnStatus::Ok);
    assert_eq!(take_string(json2), json);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { lbn_report_render(report, LbnFormat::Text, &mut text) }, LbnStatus::Ok);
    assert!(take_string(text).contains("Verdict: R1_high_confidence"));

    unsafe {
        lbn_report_free(again);
        lbn_report_free(report);
        lbn_model_free(model);
        lbn_report_free(ptr::null_mut());
        lbn_model_free(ptr::null_mut());
        lbn_string_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported_by_status_and_message() {
    let (status, model) = load("synthetic:bogus", &["x1"]);
    assert_eq!(status, LbnStatus::Model);
    assert!(model.is_null());
    assert!(last_error().contains("bogus"));

    let (status, _) = load("/no/such/weights.json", &["x1"]);
    assert_eq!(status, LbnStatus::Io);

    let (_, model) = load("synthetic:threshold:x1:0.5", &["x1"]);
    let mut report = ptr::null_mut();
    let x = [0.5];
    let bad = LbnConfig { tau: 0.2, ..lbn_config_default() };
    assert_eq!(unsafe { lbn_explain(model, x.as_ptr(), 1, &bad, &mut report) }, LbnStatus::InvalidConfig);
    assert!(last_error().contains("tau"));
    let outside = [1.5];
    assert_eq!(unsafe { lbn_explain(model, outside.as_ptr(), 1, ptr::null(), &mut report) }, LbnStatus::InvalidInput);
    assert_eq!(unsafe { lbn_explain(model, x.as_ptr(), 1, ptr::null(), ptr::null_mut()) }, LbnStatus::NullPointer);
    assert_eq!(unsafe { lbn_explain(ptr::null(), x.as_ptr(), 1, ptr::null(), &mut report) }, LbnStatus::NullPointer);
    assert!(report.is_null());
    let mut rule = LbnRule::Uncertain;
    assert_eq!(unsafe { lbn_report_rule(ptr::null(), &mut rule) }, LbnStatus::NullPointer);
    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { lbn_report_from_json(junk.as_ptr(), &mut report) }, LbnStatus::Parse);
    unsafe { lbn_model_free(model) };
}

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<this test> -> target/<profile>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_is_usable_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/localbn.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["lbn_model_load", "lbn_explain", "lbn_report_render", "lbn_report_rule", "lbn_last_error"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let lib = profile_dir().join("liblocalbn_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping C link check: no cc or static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "localbn.h"
int main(void) {
    const char *names[] = {"x1", "x2"};
    LbnModel *m = NULL;
    if (lbn_model_load("synthetic:threshold:x1:0.5", names, 2, &m) != LBN_STATUS_OK) return 1;
    LbnConfig cfg = lbn_config_default();
    cfg.epsilon = 0.05;
    double x[] = {0.1, 0.7};
    LbnReport *r = NULL;
    if (lbn_explain(m, x, 2, &cfg, &r) != LBN_STATUS_OK) { puts(lbn_last_error()); return 2; }
    LbnRule rule;
    lbn_report_rule(r, &rule);
    char *label = NULL;
    lbn_report_predicted_label(r, &label);
    printf("%s %d\n", label, (int)rule);
    lbn_string_free(label);
    lbn_report_free(r);
    lbn_model_free(m);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "neg 1");
}
