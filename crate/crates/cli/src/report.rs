//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The finite data could not decide the check.
    Insufficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub verdict: Verdict,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    /// Where the certificate lives, e.g. `details.witness`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            residuals: BTreeMap::new(),
            details: BTreeMap::new(),
            witness: None,
            error: None,
        }
    }

    pub fn failed(name: impl Into<String>, verdict: Verdict, error: String) -> Self {
        Self { verdict, error: Some(error), ..Self::new(name, false) }
    }

    pub fn residual(mut self, key: &str, value: f64) -> Self {
        self.residuals.insert(key.to_string(), value);
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub insufficient: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: BTreeMap<String, Value>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub exit_status: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: BTreeMap<String, Value>, tolerance: f64, timestamp: Option<u64>) -> Self {
        Self { command, tolerance, timestamp, records: Vec::new(), summary: Summary::default(), exit_status: 0, error: None }
    }

    /// Fills in the summary and exit status: 0 iff every record passes.
    pub fn finish(&mut self) {
        let mut s = Summary::default();
        for r in &self.records {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Insufficient => s.insufficient += 1,
            }
        }
        self.exit_status = if self.error.is_some() {
            2
        } else if s.fail + s.insufficient > 0 {
            1
        } else {
            0
        };
        self.summary = s;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let cmd = self.command.get("subcommand").and_then(Value::as_str).unwrap_or("?");
        let _ = writeln!(out, "lca {cmd}  (tol {:e})", self.tolerance);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        for r in &self.records {
            let v = match r.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Insufficient => "INSUFFICIENT",
            };
            let _ = write!(out, "{v:<12} {}", r.name);
            for (k, x) in &r.residuals {
                let _ = write!(out, "  {k}={x:.3e}");
            }
            if let Some(e) = &r.error {
                let _ = write!(out, "  ({e})");
            }
            out.push('\n');
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} passed, {} failed, {} insufficient", s.pass, s.fail, s.insufficient);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(records: Vec<Record>) -> Report {
        let mut r = Report::new(BTreeMap::new(), 1e-9, None);
        r.records = records;
        r.finish();
        r
    }

    #[test]
    fn exit_status_contract() {
        assert_eq!(with(vec![Record::new("a", true)]).exit_status, 0);
        assert_eq!(with(vec![Record::new("a", true), Record::new("b", false)]).exit_status, 1);
        let insufficient = with(vec![Record::failed("c", Verdict::Insufficient, "no node".into())]);
        assert_eq!((insufficient.exit_status, insufficient.summary.insufficient), (1, 1));
        let mut errored = with(vec![Record::new("a", true)]);
        errored.error = Some("bad input".into());
        errored.finish();
        assert_eq!(errored.exit_status, 2);
    }

    #[test]
    fn verdicts_serialize_uppercase() {
        assert_eq!(serde_json::to_string(&Verdict::Insufficient).unwrap(), "\"INSUFFICIENT\"");
        assert!(!with(vec![]).to_json().contains("timestamp"));
    }
}
