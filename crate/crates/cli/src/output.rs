//! Output assembly and atomic file writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig, CONFIG_PREFIX};
use crate::error::{validation, CliError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Real(f64),
    Int(i64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            // shortest representation that parses back to the same f64
            Cell::Real(x) => format!("{x:?}"),
            Cell::Int(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(Table),
    Record(Value),
}

fn metadata(cfg: &RunConfig) -> Value {
    json!({ "generator": "dotqip", "version": VERSION, "config": serde_json::to_value(cfg).expect("plain data") })
}

pub fn render(cfg: &RunConfig, output: &Output) -> Result<Vec<u8>, CliError> {
    match (cfg.format, output) {
        (Format::Csv, Output::Table(table)) => {
            let mut buf = format!("# dotqip {VERSION}\n{CONFIG_PREFIX}{}\n", cfg.to_json()).into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&table.columns).map_err(io)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(|c| c.render())).map_err(io)?;
                }
                w.flush()?;
            }
            Ok(buf)
        }
        (Format::Csv, Output::Record(_)) => Err(validation("this experiment only writes JSON")),
        (Format::Json, Output::Table(table)) => {
            let doc = json!({ "metadata": metadata(cfg), "columns": table.columns, "rows": table.rows });
            Ok(pretty(&doc))
        }
        (Format::Json, Output::Record(record)) => Ok(pretty(&json!({ "metadata": metadata(cfg), "record": record }))),
    }
}

fn pretty(doc: &Value) -> Vec<u8> {
    let mut text = serde_json::to_vec_pretty(doc).expect("plain data");
    text.push(b'\n');
    text
}

/// Writes to a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(validation(format!("output directory {} does not exist", dir.display())));
    }
    let name = path.file_name().ok_or_else(|| validation(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
