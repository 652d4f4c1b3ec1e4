//! Report envelope and the three renderers.

use std::io::Write;

use mollifier_core::empirical::write_census_csv;
use mollifier_core::optimizer::write_scan_csv;
use mollifier_core::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Format, RunConfig};
use crate::commands::{Outcome, Table};

/// Every JSON report has exactly these four keys.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub warnings: Vec<String>,
    pub result: Value,
}

pub fn render<W: Write>(config: &RunConfig, outcome: Outcome, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => match outcome.table {
            Some(Table::Scan(rows)) => write_scan_csv(&rows, out),
            Some(Table::Census(rows)) => write_census_csv(&rows, out),
            None => Err(Error::UnsupportedParameter(format!(
                "csv output is available for scan, empirical and census, not {}",
                config.command.name()
            ))),
        },
        Format::Json => {
            let report = Report {
                command: config.command.name().to_string(),
                config: config.clone(),
                warnings: outcome.warnings,
                result: outcome.result,
            };
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Error::Io(e.into()))?;
            writeln!(out)?;
            Ok(())
        }
        Format::Text => {
            writeln!(out, "command = {}", config.command.name())?;
            for w in &outcome.warnings {
                writeln!(out, "warning: {w}")?;
            }
            let mut lines = Vec::new();
            flatten("", &outcome.result, &mut lines);
            for line in lines {
                writeln!(out, "{line}")?;
            }
            Ok(())
        }
    }
}

/// `a.b[2].c = value`, one leaf per line, in document order.
fn flatten(prefix: &str, value: &Value, lines: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, lines);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, lines);
            }
        }
        Value::String(s) => lines.push(format!("{prefix} = {s}")),
        other => lines.push(format!("{prefix} = {other}")),
    }
}

/// 0 success, 1 I/O, 2 invalid input, 3 capacity, 4 accuracy.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        Error::Capacity { .. } => 3,
        Error::Accuracy(_) => 4,
        Error::Domain(_)
        | Error::Precondition(_)
        | Error::UnsupportedParameter(_)
        | Error::Degenerate(_)
        | Error::Consistency(_)
        | Error::Validation(_)
        | Error::Parse(_) => 2,
    }
}
