//! Experiment reports: a JSON header line followed by a `t,value` CSV body.
//!
//! ```text
//! # {"experiment":"heat-decay","parameters":{...},"slope":-1.99,...}
//! t,value
//! 1.00000000000e-3,9.87207211062e5
//! ```
//!
//! All floating-point values are rounded to 12 significant digits before
//! writing, so parsing a written report gives back exactly the rounded report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            serde_json::Number::from_f64(round12(n.as_f64().expect("f64"))).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, v)| (k.clone(), round_value(v))).collect()),
        other => other.clone(),
    }
}

/// Measurements of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, Value>,
    /// `(t, value)` pairs with strictly increasing `t`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    /// Sub-experiments (for example the two sides of a threshold).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<ExperimentReport>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    experiment: String,
    parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    runs: Vec<ExperimentReport>,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        ExperimentReport { experiment: experiment.to_string(), ..Default::default() }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Checks that `t` is strictly increasing and values are positive.
    pub fn validate(&self) -> Result<()> {
        if self.rows.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Precondition("report t values must be strictly increasing".into()));
        }
        if self.rows.iter().any(|r| !(r.1 > 0.0)) {
            return Err(Error::Precondition("report values must be positive".into()));
        }
        self.runs.iter().try_for_each(ExperimentReport::validate)
    }

    /// The report with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        ExperimentReport {
            experiment: self.experiment.clone(),
            parameters: self.parameters.iter().map(|(k, v)| (k.clone(), round_value(v))).collect(),
            rows: self.rows.iter().map(|&(t, v)| (round12(t), round12(v))).collect(),
            slope: self.slope.map(round12),
            stderr: self.stderr.map(round12),
            verdict: self.verdict.clone(),
            runs: self.runs.iter().map(ExperimentReport::rounded).collect(),
        }
    }

    /// Header line, column line and one line per row.
    pub fn to_text(&self) -> String {
        let r = self.rounded();
        let header = Header {
            experiment: r.experiment,
            parameters: r.parameters,
            slope: r.slope,
            stderr: r.stderr,
            verdict: r.verdict,
            runs: r.runs,
        };
        let mut out = format!("# {}\nt,value\n", serde_json::to_string(&header).expect("serializable"));
        for (t, v) in &r.rows {
            out.push_str(&format!("{t:.11e},{v:.11e}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::Schema("missing report header".into()))?;
        let h: Header = serde_json::from_str(header)?;
        if lines.next() != Some("t,value") {
            return Err(Error::Schema("missing column line".into()));
        }
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (t, v) = line.split_once(',').ok_or_else(|| Error::Schema(format!("bad row {line:?}")))?;
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Schema(format!("bad number {s:?}")));
            rows.push((parse(t)?, parse(v)?));
        }
        Ok(ExperimentReport {
            experiment: h.experiment,
            parameters: h.parameters,
            rows,
            slope: h.slope,
            stderr: h.stderr,
            verdict: h.verdict,
            runs: h.runs,
        })
    }
}

/// Writes `report` to `path`.
pub fn write_report(report: &ExperimentReport, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_text())?;
    Ok(())
}
