//! Sample tables, reports and manifests.

use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Decimal rendering with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Layout of a `samples_<name>.csv` file. Every row starts with the replica
/// index; the first `int_cols` columns are written as integers.
#[derive(Debug, Clone)]
pub struct TableSpec {
    pub name: String,
    pub header: Vec<String>,
    pub int_cols: usize,
    pub rows_per_replica: usize,
}

impl TableSpec {
    pub fn new(name: &str, header: &[&str]) -> Self {
        TableSpec { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), int_cols: 1, rows_per_replica: 1 }
    }

    pub fn path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("samples_{}.csv", self.name))
    }

    fn format_row(&self, row: &[f64]) -> String {
        let cells: Vec<String> = row.iter().enumerate().map(|(k, &v)| if k < self.int_cols { format!("{}", v as i64) } else { fmt_f64(v) }).collect();
        cells.join(",") + "\n"
    }

    fn parse_row(&self, line: &str) -> Option<Vec<f64>> {
        let row: Vec<f64> = line.split(',').map(|c| c.parse::<f64>().ok()).collect::<Option<_>>()?;
        (row.len() == self.header.len()).then_some(row)
    }
}

/// Replica rows already on disk, keeping only whole replicas in order.
fn read_completed(spec: &TableSpec, path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(_) => return Ok(Vec::new()),
    };
    let mut lines = BufReader::new(file).lines();
    match lines.next() {
        Some(Ok(h)) if h == spec.header.join(",") => {}
        _ => return Ok(Vec::new()),
    }
    let mut rows = Vec::new();
    for line in lines {
        let Ok(line) = line else { break };
        let Some(row) = spec.parse_row(&line) else { break };
        if row[0] as usize != rows.len() / spec.rows_per_replica {
            break;
        }
        rows.push(row);
    }
    rows.truncate(rows.len() / spec.rows_per_replica * spec.rows_per_replica);
    Ok(rows)
}

/// Computes replicas `0..replicas` in batches, appending each batch to the
/// table before starting the next. With `resume`, whole replicas already on
/// disk are kept and not recomputed. Returns every row in replica order.
pub fn run_table<F>(dir: &Path, spec: &TableSpec, replicas: usize, batch: usize, resume: bool, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(usize) -> Result<Vec<Vec<f64>>> + Sync,
{
    let path = spec.path(dir);
    let mut rows = if resume { read_completed(spec, &path)? } else { Vec::new() };
    let done = (rows.len() / spec.rows_per_replica).min(replicas);
    rows.truncate(done * spec.rows_per_replica);
    let io = |e| Error::io(format!("writing {}", path.display()), e);
    {
        let mut w = BufWriter::new(File::create(&path).map_err(io)?);
        w.write_all((spec.header.join(",") + "\n").as_bytes()).map_err(io)?;
        for r in &rows {
            w.write_all(spec.format_row(r).as_bytes()).map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    let mut start = done;
    while start < replicas {
        let end = (start + batch).min(replicas);
        let chunk: Vec<Vec<Vec<f64>>> = (start..end).into_par_iter().map(&f).collect::<Result<_>>()?;
        let mut w = BufWriter::new(OpenOptions::new().append(true).open(&path).map_err(io)?);
        for (i, rep) in chunk.into_iter().enumerate() {
            if rep.len() != spec.rows_per_replica {
                return Err(Error::Estimator(format!("replica {} produced {} rows, expected {}", start + i, rep.len(), spec.rows_per_replica)));
            }
            for r in rep {
                w.write_all(spec.format_row(&r).as_bytes()).map_err(io)?;
                rows.push(r);
            }
        }
        w.flush().map_err(io)?;
        start = end;
    }
    Ok(rows)
}

/// Writes a whole table at once (no resumption).
pub fn write_table(dir: &Path, spec: &TableSpec, rows: &[Vec<f64>]) -> Result<()> {
    let path = spec.path(dir);
    let io = |e| Error::io(format!("writing {}", path.display()), e);
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    w.write_all((spec.header.join(",") + "\n").as_bytes()).map_err(io)?;
    for r in rows {
        w.write_all(spec.format_row(r).as_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// What a check's target rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// A limit law, checked at finite resolution.
    AsymptoticLaw,
    /// Holds exactly for every cutoff.
    ExactIdentity,
    /// A closed form computed independently of the code under test.
    ClosedForm,
    /// A tolerance or threshold picked for the harness.
    HarnessChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|observed - target| <= tolerance * |target|`.
    Relative,
    /// `|observed - target| <= tolerance`.
    Absolute,
    /// `observed <= target`.
    AtMost,
    /// `observed >= target`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub target: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub basis: Basis,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, target: f64, tolerance: f64, comparison: Comparison, basis: Basis) -> Self {
        let passed = match comparison {
            Comparison::Relative => (observed - target).abs() <= tolerance * target.abs(),
            Comparison::Absolute => (observed - target).abs() <= tolerance,
            Comparison::AtMost => observed <= target,
            Comparison::AtLeast => observed >= target,
        };
        Check { name: name.into(), observed, target, tolerance, comparison, basis, passed }
    }

    pub fn relative(name: impl Into<String>, observed: f64, target: f64, tol: f64, basis: Basis) -> Self {
        Check::new(name, observed, target, tol, Comparison::Relative, basis)
    }

    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64, basis: Basis) -> Self {
        Check::new(name, observed, bound, 0.0, Comparison::AtMost, basis)
    }

    pub fn at_least(name: impl Into<String>, observed: f64, bound: f64, basis: Basis) -> Self {
        Check::new(name, observed, bound, 0.0, Comparison::AtLeast, basis)
    }

    /// `|z| < 3`.
    pub fn z_score(name: impl Into<String>, z: f64, basis: Basis) -> Self {
        let mut c = Check::new(name, z, 0.0, 3.0, Comparison::Absolute, basis);
        c.passed = z.abs() < 3.0;
        c
    }

    /// A yes/no condition, recorded as 1/0 against 1.
    pub fn flag(name: impl Into<String>, ok: bool, basis: Basis) -> Self {
        Check::at_least(name, f64::from(u8::from(ok)), 1.0, basis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub config_hash: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub summary: serde_json::Value,
}

impl Report {
    pub fn new(kind: &str, config_hash: &str, checks: Vec<Check>, warnings: Vec<String>, summary: serde_json::Value) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Report { kind: kind.into(), config_hash: config_hash.into(), passed, checks, warnings, summary }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub config_hash: String,
    pub config: String,
    pub status: String,
    pub started_unix: u64,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_manifest(dir: &Path) -> Option<Manifest> {
    let text = fs::read_to_string(dir.join("manifest.json")).ok()?;
    serde_json::from_str(&text).ok()
}
