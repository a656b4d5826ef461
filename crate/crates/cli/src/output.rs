use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use gaugekit::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub command: &'a str,
    pub config: &'a Value,
    pub report: &'a Value,
}

/// Scalar leaves of `v` as `(path, value)` rows, in key order.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(k), x, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

pub fn render(env: &Envelope, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(env).map_err(|e| Error::Input(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", env.report, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| Error::Input(e.to_string());
            w.write_record(["command", "key", "value"]).map_err(fail)?;
            for (k, v) in rows {
                w.write_record([env.command, &k, &v]).map_err(fail)?;
            }
            w.into_inner().map_err(|e| Error::Input(e.to_string()))
        }
    }
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Error::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| Error::Input(e.to_string())),
    }
}
