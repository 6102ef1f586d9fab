//! Artifact writing with provenance.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Identifies the build, config and command that produced an artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &'static str, config_text: &str, seed: u64) -> Self {
        Self {
            tool: "cavitas",
            version: VERSION,
            command,
            config_sha256: format!("{:x}", Sha256::digest(config_text.as_bytes())),
            seed,
        }
    }
}

/// One row of a table.
pub type Row = Vec<Cell>;

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Non-finite numbers become null in JSON.
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x.into())
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Writes artifacts into one directory. All writes go through this single
/// value, so concurrent pipelines never interleave files.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    format: Format,
    provenance: Provenance,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, format: Format, provenance: Provenance) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            provenance,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `value` as a JSON object with a leading `provenance` entry.
    /// Non-object values are stored under `data`.
    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<PathBuf> {
        let mut obj = Map::new();
        obj.insert("provenance".into(), serde_json::to_value(&self.provenance)?);
        match serde_json::to_value(value)? {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("data".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj))?;
        text.push('\n');
        self.put(&format!("{stem}.json"), text.as_bytes())
    }

    /// Writes a table in the configured format: CSV with a `#` provenance
    /// line above the header, or JSON with one object per row.
    pub fn table(&mut self, stem: &str, columns: &[&str], rows: &[Row]) -> Result<PathBuf> {
        match self.format {
            Format::Csv => {
                let mut buf = format!(
                    "# {} {} command={} config_sha256={} seed={}\n",
                    self.provenance.tool,
                    self.provenance.version,
                    self.provenance.command,
                    self.provenance.config_sha256,
                    self.provenance.seed
                )
                .into_bytes();
                {
                    let mut w = csv::Writer::from_writer(&mut buf);
                    w.write_record(columns).map_err(csv_io)?;
                    for row in rows {
                        w.write_record(row.iter().map(Cell::csv)).map_err(csv_io)?;
                    }
                    w.flush()?;
                }
                self.put(&format!("{stem}.csv"), &buf)
            }
            Format::Json => {
                let records: Vec<Value> = rows
                    .iter()
                    .map(|row| {
                        let m: Map<String, Value> = columns
                            .iter()
                            .map(|c| c.to_string())
                            .zip(row.iter().map(Cell::json))
                            .collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut obj = Map::new();
                obj.insert("columns".into(), Value::from(columns.to_vec()));
                obj.insert("rows".into(), Value::Array(records));
                self.json(stem, &Value::Object(obj))
            }
        }
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_provenance_then_header() {
        let dir = tempfile::tempdir().unwrap();
        let mut w =
            ArtifactWriter::new(dir.path(), Format::Csv, Provenance::new("test", "{}", 7)).unwrap();
        let p = w
            .table("t", &["n", "x"], &[vec![8u32.into(), 0.5.into()]])
            .unwrap();
        let text = fs::read_to_string(p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# cavitas ") && lines[0].contains("config_sha256=44136fa3"));
        assert_eq!(lines[1], "n,x");
        assert_eq!(lines[2], "8,5e-1");
    }

    #[test]
    fn json_puts_provenance_first() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path(), Format::Json, Provenance::new("test", "{}", 0))
            .unwrap();
        let p = w.table("t", &["x"], &[vec![f64::NAN.into()]]).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["provenance", "columns", "rows"]);
        assert!(v["rows"][0]["x"].is_null());
    }
}
