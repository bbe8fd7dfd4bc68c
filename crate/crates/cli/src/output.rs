//! Report writers.
//!
//! Every command writes `<command>.<format>` into the output directory.
//! JSON reports share one shape, `{"config": <resolved echo>, "result": ..}`.
//! CSV is either the documented tabular layout (`tornado`, `iso`) or a flat
//! `key,value` dump of the same report object. CSV floats carry nine
//! significant digits; JSON keeps full round-trip precision.

use crate::config::{CliError, RawConfig};
use deterrence_core::{IsoCurve, TornadoRow};
use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub config: &'a RawConfig,
    pub result: &'a T,
}

fn float(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Flattens a report into `key,value` rows with dotted paths and `[i]`
/// array indices. Values are numbers, booleans, nulls, and bare enum tags,
/// so no CSV quoting is needed.
pub fn key_value_csv<T: Serialize>(value: &T) -> String {
    let tree = serde_json::to_value(value).expect("report serialization cannot fail");
    let mut rows = String::from("key,value\n");
    walk("", &tree, &mut rows);
    rows
}

fn walk(prefix: &str, node: &Value, rows: &mut String) {
    match node {
        Value::Object(map) => {
            for (key, child) in map {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                walk(&path, child, rows);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                walk(&format!("{prefix}[{i}]"), child, rows);
            }
        }
        Value::Null => {
            rows.push_str(prefix);
            rows.push_str(",\n");
        }
        Value::Bool(b) => {
            rows.push_str(&format!("{prefix},{b}\n"));
        }
        Value::Number(num) => {
            let rendered = if let Some(i) = num.as_i64() {
                i.to_string()
            } else if let Some(u) = num.as_u64() {
                u.to_string()
            } else {
                float(num.as_f64().unwrap_or(f64::NAN))
            };
            rows.push_str(&format!("{prefix},{rendered}\n"));
        }
        Value::String(s) => {
            rows.push_str(&format!("{prefix},{s}\n"));
        }
    }
}

pub fn tornado_csv(rows: &[TornadoRow]) -> String {
    let mut out = String::from("parameter,low_value,low_metric,high_value,high_metric,baseline_metric\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.parameter,
            float(row.low_value),
            float(row.low_metric),
            float(row.high_value),
            float(row.high_metric),
            float(row.baseline_metric),
        ));
    }
    out
}

pub fn iso_csv(curves: &[IsoCurve]) -> String {
    let mut out = String::from("level,beta,p_k\n");
    for curve in curves {
        for point in &curve.points {
            out.push_str(&format!(
                "{},{},{}\n",
                float(curve.level),
                float(point.beta),
                float(point.p_k),
            ));
        }
    }
    out
}

/// Writes `name.<ext>` under `out_dir`, creating the directory first.
pub fn write_report(out_dir: &Path, name: &str, format: Format, text: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| {
        CliError::Validation(format!("cannot create output directory {}: {e}", out_dir.display()))
    })?;
    let path = out_dir.join(format!("{name}.{}", format.extension()));
    fs::write(&path, text)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
