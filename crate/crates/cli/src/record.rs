//! Run records: what was asked, what came out, and when.

use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::commands::{execute, Rendered, Report};
use crate::render::{grid, pairs, Csv};
use crate::{Command, Failure};

pub const RECORD_FORMAT: u32 = 1;

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub format_version: u32,
    pub tool_version: String,
    /// The command with every parameter resolved, seeds included.
    pub invocation: Command,
    pub output: serde_json::Value,
    pub exit_code: i32,
    pub started_at: String,
    pub finished_at: String,
}

impl RunRecord {
    pub fn new(invocation: Command, rendered: &Rendered, started_at: String) -> Self {
        RunRecord {
            format_version: RECORD_FORMAT,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            invocation,
            output: rendered.json.clone(),
            exit_code: rendered.code,
            started_at,
            finished_at: now(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Failure::usage(e.to_string()))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let record: RunRecord =
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        if record.format_version != RECORD_FORMAT {
            return Err(Failure::usage(format!("unsupported record format {}", record.format_version)));
        }
        Ok(record)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub command: String,
    pub recorded_at: String,
    pub recorded_tool_version: String,
    pub matches: bool,
    /// JSON pointers to the first few differing values.
    pub differences: Vec<String>,
    pub output: serde_json::Value,
}

impl Report for ReplayReport {
    fn table(&self) -> String {
        let verdict = if self.matches { "outputs match".to_string() } else { "OUTPUTS DIFFER".to_string() };
        let mut out = pairs(&[
            ("command", self.command.clone()),
            ("recorded at", self.recorded_at.clone()),
            ("recorded by", format!("monty {}", self.recorded_tool_version)),
            ("replay", verdict),
        ]);
        if !self.differences.is_empty() {
            let rows: Vec<Vec<String>> = self.differences.iter().map(|d| vec![d.clone()]).collect();
            out.push_str(&grid(&["differs at"], &rows));
        }
        out
    }

    fn csv(&self) -> Csv {
        let mut c = Csv::new(["command", "recorded_at", "matches", "differences"]);
        c.push([self.command.clone(), self.recorded_at.clone(), self.matches.to_string(), self.differences.join(" ")]);
        c
    }

    fn exit_code(&self) -> i32 {
        if self.matches {
            crate::exit::SUCCESS
        } else {
            crate::exit::MISMATCH
        }
    }
}

const MAX_DIFFERENCES: usize = 10;

fn diff(a: &serde_json::Value, b: &serde_json::Value, at: String, out: &mut Vec<String>) {
    use serde_json::Value;
    if out.len() >= MAX_DIFFERENCES || a == b {
        return;
    }
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff(u, v, format!("{at}/{k}"), out),
                    _ => out.push(format!("{at}/{k}")),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                diff(u, v, format!("{at}/{i}"), out);
            }
        }
        _ => out.push(if at.is_empty() { "/".into() } else { at }),
    }
}

pub fn cmd_replay(path: &Path) -> Result<ReplayReport, Failure> {
    let record = RunRecord::load(path)?;
    if matches!(record.invocation, Command::Replay(_) | Command::Play(_)) {
        return Err(Failure::usage("record does not hold a replayable command"));
    }
    let rendered = execute(&record.invocation)?;
    let mut differences = Vec::new();
    diff(&record.output, &rendered.json, String::new(), &mut differences);
    if rendered.code != record.exit_code {
        differences.push(format!("exit code {} (recorded {})", rendered.code, record.exit_code));
    }
    Ok(ReplayReport {
        command: record.invocation.name().to_string(),
        recorded_at: record.started_at,
        recorded_tool_version: record.tool_version,
        matches: differences.is_empty(),
        differences,
        output: rendered.json,
    })
}
