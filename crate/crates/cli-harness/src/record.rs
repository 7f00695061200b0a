//! Result records: content hashes, per-check verdicts, and the three emit
//! formats. Timing is recorded but excluded from the determinism hash.

use crate::HarnessError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(check: impl Into<String>, value: f64, tolerance: f64, pass: bool) -> Verdict {
        Verdict { check: check.into(), value, tolerance, pass }
    }

    /// A check whose |value| must stay within the tolerance.
    pub fn within(check: impl Into<String>, value: f64, tolerance: f64) -> Verdict {
        Verdict::new(check, value, tolerance, value.abs() <= tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RunStatus {
    Complete,
    /// The pipeline failed at the named stage; earlier verdicts and artifact
    /// files are intact.
    Partial(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub config_hash: String,
    /// Git-style blob hash of the raw config file bytes.
    pub input_hash: String,
    pub status: RunStatus,
    pub verdicts: Vec<Verdict>,
    pub artifacts: Vec<String>,
    pub timing_ms: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Git-style content hash of an input file: `blob <len>\0<bytes>`.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl ResultRecord {
    pub fn all_pass(&self) -> bool {
        self.status == RunStatus::Complete && self.verdicts.iter().all(|v| v.pass)
    }

    /// Determinism hash over everything except timing: two runs of the same
    /// config in a deterministic mode must agree on this.
    pub fn result_hash(&self) -> String {
        let mut payload = String::new();
        payload.push_str(&self.config_hash);
        for v in &self.verdicts {
            payload.push_str(&format!("|{}={:.17e}/{:.17e}/{}", v.check, v.value, v.tolerance, v.pass));
        }
        for a in &self.artifacts {
            payload.push('|');
            payload.push_str(a);
        }
        sha256_hex(payload.as_bytes())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmitFormat {
    Json,
    Csv,
    MdSummary,
}

impl EmitFormat {
    pub fn parse(s: &str) -> Option<EmitFormat> {
        Some(match s {
            "json" => EmitFormat::Json,
            "csv" => EmitFormat::Csv,
            "md" | "md-summary" => EmitFormat::MdSummary,
            _ => return None,
        })
    }
}

/// Writes the record in the requested format and returns the file path.
/// Output is bit-stable: the same record always produces identical bytes.
pub fn emit_results(
    record: &ResultRecord,
    format: EmitFormat,
    dir: &Path,
) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir)?;
    let path = match format {
        EmitFormat::Json => {
            let path = dir.join("record.json");
            let mut value = serde_json::to_value(record)?;
            value
                .as_object_mut()
                .expect("record serializes to an object")
                .insert("result_hash".into(), record.result_hash().into());
            let mut text = serde_json::to_string_pretty(&value)?;
            text.push('\n');
            fs::write(&path, text)?;
            path
        }
        EmitFormat::Csv => {
            let path = dir.join("verdicts.csv");
            let mut w = csv::Writer::from_path(&path)
                .map_err(|e| HarnessError::Run(format!("csv: {e}")))?;
            w.write_record(["check", "value", "tolerance", "pass"])
                .map_err(|e| HarnessError::Run(format!("csv: {e}")))?;
            for v in &record.verdicts {
                w.write_record([
                    v.check.clone(),
                    format!("{:.17e}", v.value),
                    format!("{:.17e}", v.tolerance),
                    v.pass.to_string(),
                ])
                .map_err(|e| HarnessError::Run(format!("csv: {e}")))?;
            }
            w.flush()?;
            path
        }
        EmitFormat::MdSummary => {
            let path = dir.join("summary.md");
            fs::write(&path, md_summary(record))?;
            path
        }
    };
    Ok(path)
}

/// The one-page summary table, also printed to stdout after a run.
pub fn md_summary(record: &ResultRecord) -> String {
    let mut s = String::new();
    s.push_str("# Run summary\n\n");
    s.push_str(&format!("- config hash: `{}`\n", record.config_hash));
    s.push_str(&format!("- input hash: `{}`\n", record.input_hash));
    s.push_str(&format!("- result hash: `{}`\n", record.result_hash()));
    match &record.status {
        RunStatus::Complete => s.push_str("- status: complete\n"),
        RunStatus::Partial(stage) => {
            s.push_str(&format!("- status: PARTIAL (failed at {stage})\n"))
        }
    }
    s.push_str("\n| check | value | tolerance | verdict |\n");
    s.push_str("|---|---|---|---|\n");
    for v in &record.verdicts {
        s.push_str(&format!(
            "| {} | {:.6} | {:.6} | {} |\n",
            v.check,
            v.value,
            v.tolerance,
            if v.pass { "pass" } else { "FAIL" }
        ));
    }
    if !record.artifacts.is_empty() {
        s.push_str("\nArtifacts:\n");
        for a in &record.artifacts {
            s.push_str(&format!("- {a}\n"));
        }
    }
    s
}
