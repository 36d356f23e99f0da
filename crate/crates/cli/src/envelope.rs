use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qrev_core::criteria::{CriterionReport, Verdict};
use qrev_core::io::{finite_or_string, parse_text, report_to_json, witnesses_to_json};
use qrev_core::LogBase;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Outcome of a command, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Unknown => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unknown => "unknown",
        }
    }
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Reversible => Status::Pass,
            Verdict::NotReversible => Status::Fail,
            Verdict::Unknown => Status::Unknown,
        }
    }
}

/// Content hash over every input consumed by a command.
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        Self { hasher }
    }

    fn absorb(&mut self, name: &str, bytes: &[u8]) {
        self.hasher.update([0u8]);
        self.hasher.update(name.as_bytes());
        self.hasher.update([0u8]);
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    /// Reads and parses a JSON input file, folding its bytes into the digest.
    pub fn load(&mut self, name: &str, path: &Path) -> Result<Value, String> {
        let bytes =
            fs::read(path).map_err(|e| format!("{name}: cannot read {}: {e}", path.display()))?;
        self.absorb(name, &bytes);
        let text = String::from_utf8(bytes)
            .map_err(|_| format!("{name}: {} is not UTF-8", path.display()))?;
        parse_text(&text).map_err(|e| format!("{name}: {e}"))
    }

    /// Records a generator parameter.
    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.absorb(name, value.to_string().as_bytes());
    }

    pub fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

/// Result of one command before it is wrapped with the run settings.
pub struct Outcome {
    pub status: Status,
    pub verdict: String,
    pub residuals: Map<String, Value>,
    pub witnesses: Map<String, Value>,
    pub details: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn check(ok: bool) -> Self {
        Self::with_status(Status::from_bool(ok))
    }

    pub fn with_status(status: Status) -> Self {
        Self {
            status,
            verdict: status.label().to_string(),
            residuals: Map::new(),
            witnesses: Map::new(),
            details: Map::new(),
            warnings: Vec::new(),
        }
    }

    /// Copies the verdict, residual values, witnesses and statements of a
    /// criterion report.
    pub fn from_report(report: &CriterionReport) -> Self {
        let mut out = Self::with_status(report.verdict.into());
        out.verdict = report.verdict.as_str().to_string();
        for (k, v) in &report.values {
            out.residual(k, *v);
        }
        for (k, s) in &report.statements {
            if let Some(r) = s.residual {
                out.residual(&format!("{k}_residual"), r);
            }
        }
        if let Value::Object(w) = witnesses_to_json(report) {
            out.witnesses = w;
        }
        let mut body = report_to_json(report);
        if let Value::Object(fields) = &mut body {
            fields.remove("witnesses");
        }
        out.details.insert("report".into(), body);
        out.warnings = report.warnings.clone();
        out
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.verdict = status.label().to_string();
    }

    pub fn residual(&mut self, name: &str, value: f64) -> &mut Self {
        self.residuals
            .insert(name.to_string(), finite_or_string(value));
        self
    }

    pub fn witness(&mut self, name: &str, value: Value) -> &mut Self {
        self.witnesses.insert(name.to_string(), value);
        self
    }

    pub fn detail(&mut self, name: &str, value: Value) -> &mut Self {
        self.details.insert(name.to_string(), value);
        self
    }
}

pub struct Settings {
    pub tolerance: f64,
    pub log_base: LogBase,
    pub seed: Option<u64>,
}

pub fn envelope(
    command: &str,
    digest: String,
    outcome: &Outcome,
    settings: &Settings,
    wall_time_ms: u64,
) -> Value {
    json!({
        "command": command,
        "inputs_digest": digest,
        "verdict": outcome.verdict,
        "residuals": outcome.residuals,
        "witnesses": outcome.witnesses,
        "details": outcome.details,
        "warnings": outcome.warnings,
        "tolerance": settings.tolerance,
        "log_base": settings.log_base.label(),
        "seed": settings.seed,
        "wall_time_ms": wall_time_ms,
    })
}

/// Aligned summary printed ahead of the JSON body in pretty mode.
pub fn summary_table(envelope: &Value) -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    for key in [
        "command",
        "verdict",
        "inputs_digest",
        "tolerance",
        "log_base",
        "seed",
    ] {
        rows.push((key.to_string(), plain(&envelope[key])));
    }
    let mut out = String::new();
    push_table(&mut out, &rows);
    if let Some(residuals) = envelope["residuals"].as_object().filter(|r| !r.is_empty()) {
        out.push_str("\nresiduals\n");
        let rows: Vec<(String, String)> = residuals
            .iter()
            .map(|(k, v)| (format!("  {k}"), plain(v)))
            .collect();
        push_table(&mut out, &rows);
    }
    if let Some(statements) = envelope["details"]["report"]["statements"].as_object() {
        out.push_str("\nstatements\n");
        let rows: Vec<(String, String)> = statements
            .iter()
            .map(|(k, v)| (format!("  {k}"), plain(&v["outcome"])))
            .collect();
        push_table(&mut out, &rows);
    }
    for w in envelope["warnings"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "warning: {}", plain(w));
    }
    out
}

fn push_table(out: &mut String, rows: &[(String, String)]) {
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}
