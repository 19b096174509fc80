//! Artifact writing and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dimer_core::spectra::{fmt_num, intensity_csv, series_csv, spectrum_csv, CorrelationSeries, IntensitySpectrum, PowerSpectrum, RmsReport};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
    pub config: RunConfig,
    pub artifacts: Vec<Artifact>,
    pub rms: BTreeMap<String, RmsReport>,
    pub metrics: BTreeMap<String, Value>,
}

/// Collects artifacts under one directory and writes `manifest.json` last.
pub struct Output {
    dir: PathBuf,
    format: Format,
    manifest: Manifest,
}

impl Output {
    pub fn new(command: &str, cfg: &RunConfig) -> Result<Self, CliError> {
        let dir = cfg.output.dir.clone();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        let mut recorded = cfg.clone();
        recorded.output.dir = PathBuf::new();
        let versions = BTreeMap::from([
            ("dimer-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("dimer-core".to_string(), dimer_core::VERSION.to_string()),
        ]);
        Ok(Output {
            dir,
            format: cfg.output.format,
            manifest: Manifest {
                command: command.to_string(),
                config_hash: cfg.hash(),
                seed: cfg.estimator.seed,
                versions,
                config: recorded,
                artifacts: Vec::new(),
                rms: BTreeMap::new(),
                metrics: BTreeMap::new(),
            },
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.artifacts.push(Artifact { path: name.to_string(), sha256: hex::encode(Sha256::digest(contents.as_bytes())) });
        Ok(())
    }

    fn ext(&self) -> &'static str {
        match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn series(&mut self, stem: &str, s: &CorrelationSeries) -> Result<(), CliError> {
        let body = match self.format {
            Format::Csv => series_csv(s),
            Format::Json => pretty(&json!({
                "channel": s.channel.label(),
                "provenance": s.provenance.to_string(),
                "t": s.times,
                "re": s.values.iter().map(|v| v.re).collect::<Vec<_>>(),
                "im": s.values.iter().map(|v| v.im).collect::<Vec<_>>(),
            })),
        };
        self.write(&format!("{stem}.{}", self.ext()), &body)
    }

    pub fn spectrum(&mut self, stem: &str, p: &PowerSpectrum) -> Result<(), CliError> {
        let body = match self.format {
            Format::Csv => spectrum_csv(p),
            Format::Json => pretty(&json!({ "omega": p.omegas, "power": p.power })),
        };
        self.write(&format!("{stem}.{}", self.ext()), &body)
    }

    pub fn intensity(&mut self, stem: &str, s: &IntensitySpectrum) -> Result<(), CliError> {
        let body = match self.format {
            Format::Csv => intensity_csv(s),
            Format::Json => pretty(&json!({ "omega": s.omegas, "intensity": s.intensity })),
        };
        self.write(&format!("{stem}.{}", self.ext()), &body)
    }

    /// Generic table: CSV with the given header, or JSON with one array
    /// per column.
    pub fn table(&mut self, stem: &str, columns: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
        let body = match self.format {
            Format::Csv => {
                let mut out = columns.join(",");
                out.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(Cell::render).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut map = serde_json::Map::new();
                for (k, name) in columns.iter().enumerate() {
                    map.insert(name.to_string(), Value::Array(rows.iter().map(|r| r[k].json()).collect()));
                }
                pretty(&Value::Object(map))
            }
        };
        self.write(&format!("{stem}.{}", self.ext()), &body)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.write(name, &pretty(value))
    }

    pub fn rms(&mut self, key: String, report: RmsReport) {
        self.manifest.rms.insert(key, report);
    }

    pub fn metric(&mut self, key: impl Into<String>, value: impl Serialize) {
        self.manifest.metrics.insert(key.into(), serde_json::to_value(value).expect("metric serializes"));
    }

    pub fn finish(self) -> Result<Manifest, CliError> {
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, pretty(&self.manifest))
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        Ok(self.manifest)
    }
}

pub fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

/// Table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}
