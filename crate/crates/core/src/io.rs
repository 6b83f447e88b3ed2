//! Population CSV files and summary files.
//!
//! Population CSV: header `y,phi1,phi2`, one row per unit, attributes as
//! integers 0/1, `y` as a decimal.
//!
//! Summary file: flat `key = value` lines (TOML syntax) with keys `N`,
//! `mean_y`, `P1`, `P2`, `var_y`, `var_phi1`, `var_phi2`, `rho_pb1`,
//! `rho_pb2`, `rho_phi`. Optional `n` and `n_prime` give a default design
//! and `reference` names a bundled published table.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::population::{FinitePopulation, PopulationSummary, Unit, Violation};

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Parses population CSV text. Malformed lines give [`Error::Parse`];
/// well-formed rows with invalid values give [`Error::InvalidPopulation`].
pub fn parse_population_csv(text: &str) -> Result<FinitePopulation> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Parse(format!("line 1: {e}")))?;
    let names: Vec<&str> = headers.iter().collect();
    if names != ["y", "phi1", "phi2"] {
        return Err(Error::Parse(format!("line 1: expected header `y,phi1,phi2`, found `{}`", names.join(","))));
    }
    let mut units = Vec::new();
    let mut violations = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
        let line = rec.position().map_or(row + 1, |p| p.line() as usize);
        let y: f64 = rec[0].parse().map_err(|_| Error::Parse(format!("line {line}: y `{}` is not a number", &rec[0])))?;
        let mut phi = [0u8; 2];
        for (k, column) in [(1, "phi1"), (2, "phi2")] {
            let v: i64 = rec[k]
                .parse()
                .map_err(|_| Error::Parse(format!("line {line}: {column} `{}` is not an integer", &rec[k])))?;
            if v == 0 || v == 1 {
                phi[k - 1] = v as u8;
            } else {
                violations.push(Violation::NonBinaryAttribute { row, column, value: v });
            }
        }
        units.push(Unit::new(y, phi[0], phi[1]));
    }
    if units.len() < 2 {
        violations.push(Violation::TooFewUnits { units: units.len() });
    }
    if !violations.is_empty() {
        return Err(Error::InvalidPopulation(violations));
    }
    FinitePopulation::new(units)
}

pub fn read_population_csv(path: &Path) -> Result<FinitePopulation> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_population_csv(&text)
}

pub fn write_population_csv<W: Write>(pop: &FinitePopulation, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["y", "phi1", "phi2"]).map_err(wrap)?;
    for u in pop.units() {
        w.write_record([u.y.to_string(), u.phi1.to_string(), u.phi2.to_string()]).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// A parsed summary file.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryFile {
    pub summary: PopulationSummary,
    pub n: Option<usize>,
    pub n_prime: Option<usize>,
    pub reference: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSummary {
    #[serde(rename = "N")]
    population_size: usize,
    mean_y: f64,
    #[serde(rename = "P1")]
    p1: f64,
    #[serde(rename = "P2")]
    p2: f64,
    var_y: f64,
    var_phi1: f64,
    var_phi2: f64,
    rho_pb1: f64,
    rho_pb2: f64,
    rho_phi: f64,
    n: Option<usize>,
    n_prime: Option<usize>,
    reference: Option<String>,
}

pub fn parse_summary(text: &str) -> Result<SummaryFile> {
    let raw: RawSummary = toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))?;
    let summary = PopulationSummary::entered(
        raw.population_size,
        raw.mean_y,
        raw.p1,
        raw.p2,
        raw.var_y,
        raw.var_phi1,
        raw.var_phi2,
        raw.rho_pb1,
        raw.rho_pb2,
        raw.rho_phi,
    )?;
    Ok(SummaryFile { summary, n: raw.n, n_prime: raw.n_prime, reference: raw.reference })
}

pub fn read_summary(path: &Path) -> Result<SummaryFile> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_summary(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}
