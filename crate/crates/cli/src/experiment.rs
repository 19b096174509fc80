//! Ingestion of measured intensity-vs-energy tables.

use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub energy: f64,
    pub intensity: f64,
    pub error: Option<f64>,
}

/// Rows with strictly increasing energies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// Row of largest intensity with energy in `[lo, hi]`.
    pub fn peak_in(&self, lo: f64, hi: f64) -> Option<&ExperimentRow> {
        self.rows
            .iter()
            .filter(|r| r.energy >= lo && r.energy <= hi)
            .max_by(|a, b| a.intensity.total_cmp(&b.intensity))
    }
}

fn cell(record: &csv::StringRecord, col: usize, name: &str, line: u64) -> Result<f64, CliError> {
    let raw = record.get(col).unwrap_or("").trim();
    let v: f64 = raw
        .parse()
        .map_err(|_| CliError::config(format!("experiment row {line}, column {name}: {raw:?} is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::config(format!("experiment row {line}, column {name}: value is not finite")));
    }
    Ok(v)
}

/// Parses `energy,intensity[,error]`; energies are multiplied by `scale`.
/// Row numbers in messages are file line numbers.
pub fn parse_experiment<R: Read>(reader: R, scale: f64) -> Result<ExperimentTable, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::config(format!("experiment header: {e}")))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let has_error = match names.as_slice() {
        ["energy", "intensity"] => false,
        ["energy", "intensity", "error"] => true,
        _ => {
            return Err(CliError::config(format!(
                "experiment header must be energy,intensity[,error], found {}",
                names.join(",")
            )))
        }
    };
    let mut rows: Vec<ExperimentRow> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::config(format!("experiment row {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let energy = cell(&record, 0, "energy", line)? * scale;
        let intensity = cell(&record, 1, "intensity", line)?;
        let error = if has_error { Some(cell(&record, 2, "error", line)?) } else { None };
        if let Some(prev) = rows.last() {
            if energy <= prev.energy {
                return Err(CliError::config(format!(
                    "experiment row {line}, column energy: {energy} does not increase on {}",
                    prev.energy
                )));
            }
        }
        rows.push(ExperimentRow { energy, intensity, error });
    }
    if rows.is_empty() {
        return Err(CliError::config("experiment table has no rows"));
    }
    Ok(ExperimentTable { rows })
}

pub fn ingest_experiment(path: &Path, scale: f64) -> Result<ExperimentTable, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
    parse_experiment(file, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows_intact() {
        let t = parse_experiment("energy,intensity,error\n1.0,2.0,0.1\n2.0,5.0,0.2\n3.0,1.0,0.1\n".as_bytes(), 1.0).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[1], ExperimentRow { energy: 2.0, intensity: 5.0, error: Some(0.2) });
        assert_eq!(t.peak_in(0.0, 10.0).unwrap().energy, 2.0);
    }

    #[test]
    fn missing_error_column_is_absent() {
        let t = parse_experiment("energy,intensity\n1.0,2.0\n".as_bytes(), 2.0).unwrap();
        assert_eq!(t.rows[0], ExperimentRow { energy: 2.0, intensity: 2.0, error: None });
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let e = parse_experiment("energy,intensity\n1.0,2.0\n2.0,abc\n".as_bytes(), 1.0).unwrap_err();
        assert!(e.message.contains("row 3") && e.message.contains("intensity"), "{}", e.message);
    }

    #[test]
    fn energies_must_increase() {
        let e = parse_experiment("energy,intensity\n2.0,1.0\n2.0,1.0\n".as_bytes(), 1.0).unwrap_err();
        assert!(e.message.contains("row 3") && e.message.contains("energy"), "{}", e.message);
    }

    #[test]
    fn wrong_header() {
        assert!(parse_experiment("e,i\n1,2\n".as_bytes(), 1.0).is_err());
        assert!(parse_experiment("energy,intensity\n".as_bytes(), 1.0).is_err());
        assert!(parse_experiment("energy,intensity\n1,inf\n".as_bytes(), 1.0).is_err());
    }

    #[test]
    fn ragged_row() {
        let e = parse_experiment("energy,intensity\n1.0,2.0,3.0\n".as_bytes(), 1.0).unwrap_err();
        assert!(e.message.contains("row 2"), "{}", e.message);
    }
}
