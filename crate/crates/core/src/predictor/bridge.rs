//! Line-delimited JSON bridge to a black box running in another process.
//!
//! Request:  `{"features": {"<name>": <float>, ...}}`
//! Response: `{"probabilities": {"<label>": <float>, ...}}`
//!
//! One request in flight per handle; responses are read in request order.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Mutex, OnceLock};
use std::thread;
use std::time::Duration;

use serde_json::Value;

use super::{check_names, ClassDistribution, FeatureVector, Predictor};
use crate::error::{Error, Result};

pub const DEFAULT_BRIDGE_TIMEOUT_MS: u64 = 30_000;

/// Largest deviation of the reported probability sum from 1 that is still
/// renormalized rather than rejected.
const SUM_SLACK: f64 = 1e-6;

struct Channel {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

pub struct BridgePredictor {
    command: String,
    input_names: Vec<String>,
    labels: OnceLock<Vec<String>>,
    timeout: Duration,
    channel: Mutex<Channel>,
}

impl BridgePredictor {
    /// Spawns `command` through `sh -c`. When `labels` is `None` the label set
    /// is fixed by the first response (sorted by name).
    pub fn spawn(
        command: &str,
        input_names: Vec<String>,
        labels: Option<Vec<String>>,
        timeout_ms: u64,
    ) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let cell = OnceLock::new();
        if let Some(l) = labels {
            if l.len() < 2 {
                return Err(Error::Config("bridge needs at least two declared labels".into()));
            }
            let _ = cell.set(l);
        }
        Ok(Self {
            command: command.to_string(),
            input_names,
            labels: cell,
            timeout: Duration::from_millis(timeout_ms),
            channel: Mutex::new(Channel { child, stdin, lines: rx }),
        })
    }

    fn round_trip(&self, request: &str) -> Result<String> {
        let mut ch = self.channel.lock().unwrap_or_else(|p| p.into_inner());
        ch.stdin
            .write_all(request.as_bytes())
            .and_then(|_| ch.stdin.write_all(b"\n"))
            .and_then(|_| ch.stdin.flush())
            .map_err(|e| Error::Protocol(format!("write failed: {e}")))?;
        match ch.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(Error::Protocol(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(Error::Timeout(self.timeout.as_millis() as u64)),
            Err(RecvTimeoutError::Disconnected) => Err(Error::Protocol("process closed its output".into())),
        }
    }
}

pub(crate) fn encode_request(x: &FeatureVector) -> String {
    let fields: Vec<String> = x
        .names()
        .iter()
        .zip(x.values())
        .map(|(n, v)| format!("{}:{}", Value::String(n.clone()), Value::from(*v)))
        .collect();
    format!("{{\"features\":{{{}}}}}", fields.join(","))
}

/// Validates one response line against the declared labels (or, when none
/// are declared yet, the labels it carries, in sorted order).
pub(crate) fn decode_response(line: &str, declared: Option<&[String]>) -> Result<ClassDistribution> {
    let value: Value = serde_json::from_str(line.trim())
        .map_err(|e| Error::Protocol(format!("unparseable response `{line}`: {e}")))?;
    let probs = value
        .get("probabilities")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Protocol("response lacks a `probabilities` object".into()))?;
    let labels: Vec<String> = match declared {
        Some(d) => d.to_vec(),
        None => probs.keys().cloned().collect(),
    };
    if let Some(extra) = probs.keys().find(|k| !labels.contains(k)) {
        return Err(Error::Protocol(format!("undeclared label `{extra}`")));
    }
    let mut p = Vec::with_capacity(labels.len());
    for l in &labels {
        let v = probs
            .get(l)
            .ok_or_else(|| Error::Protocol(format!("missing label `{l}`")))?
            .as_f64()
            .ok_or_else(|| Error::Protocol(format!("probability of `{l}` is not a number")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidDistribution(format!("P({l}) = {v}")));
        }
        p.push(v);
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_SLACK {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
    }
    ClassDistribution::new(labels, p.into_iter().map(|v| (v / sum).min(1.0)).collect())
}

impl Predictor for BridgePredictor {
    fn input_names(&self) -> &[String] {
        &self.input_names
    }

    fn labels(&self) -> &[String] {
        self.labels.get().map_or(&[], Vec::as_slice)
    }

    fn predict(&self, x: &FeatureVector) -> Result<ClassDistribution> {
        check_names(&self.input_names, x)?;
        let line = self.round_trip(&encode_request(x))?;
        let dist = decode_response(&line, self.labels.get().map(Vec::as_slice))?;
        let _ = self.labels.set(dist.labels().to_vec());
        if self.labels() != dist.labels() {
            return Err(Error::Protocol("label set changed between responses".into()));
        }
        Ok(dist)
    }

    fn describe(&self) -> String {
        format!("cmd:{}", self.command)
    }
}

impl Drop for BridgePredictor {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|p| p.into_inner());
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}
