//! CSV and JSON input/output helpers.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use actnoise::coverage::Dataset;
use anyhow::{bail, Context, Result};
use csv::StringRecord;

/// Shortest round-trip decimal representation.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Like [`num`], rejecting non-finite values.
pub fn finite(v: f64, what: &str) -> Result<String> {
    if !v.is_finite() {
        bail!("{what} is not finite ({v})");
    }
    Ok(num(v))
}

/// Empty cell for missing or non-finite values.
pub fn opt_num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => num(x),
        _ => String::new(),
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// Writes `header` and `rows` to `dir/name` and returns the file name.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let path = dir.join(name);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(name.to_string())
}

pub fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<String> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(name.to_string())
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))
}

fn line_of(rec: &StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// Reads a states file with header `s0..s{d-1}`.
pub fn read_states(path: &Path) -> Result<Dataset> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().with_context(|| format!("{}: cannot read header", path.display()))?.clone();
    for (j, h) in header.iter().enumerate() {
        if h != format!("s{j}") {
            bail!("{}: line 1: expected column 's{j}', found '{h}'", path.display());
        }
    }
    let d = header.len();
    if d == 0 {
        bail!("{}: empty header", path.display());
    }
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let line = line_of(&rec);
        if rec.len() != d {
            bail!("{}: line {line}: expected {d} fields, found {}", path.display(), rec.len());
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| anyhow::anyhow!("{}: line {line}: column s{j}: '{cell}' is not a number", path.display()))?;
            if !v.is_finite() {
                bail!("{}: line {line}: column s{j} is not finite", path.display());
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        bail!("{}: no states", path.display());
    }
    Ok(Dataset::from_flat(values, d)?)
}

/// A long-format table kept as strings, with source line numbers.
pub struct Table {
    pub path: PathBuf,
    pub header: Vec<String>,
    pub rows: Vec<(u64, Vec<String>)>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        let mut rdr = reader(path)?;
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            let line = line_of(&rec);
            if rec.len() != header.len() {
                bail!("{}: line {line}: expected {} fields, found {}", path.display(), header.len(), rec.len());
            }
            rows.push((line, rec.iter().map(str::to_string).collect()));
        }
        if rows.is_empty() {
            bail!("{}: no data rows", path.display());
        }
        Ok(Table { path: path.to_path_buf(), header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow::anyhow!("{}: no column named '{name}'", self.path.display()))
    }

    pub fn numbers(&self, col: usize) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|(line, r)| {
                let cell = &r[col];
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => bail!(
                        "{}: line {line}: column '{}': '{cell}' is not a finite number",
                        self.path.display(),
                        self.header[col]
                    ),
                }
            })
            .collect()
    }

    /// Composite key of the given columns per row, joined by '|'.
    pub fn keys(&self, cols: &[usize]) -> Vec<String> {
        self.rows.iter().map(|(_, r)| cols.iter().map(|&c| r[c].as_str()).collect::<Vec<_>>().join("|")).collect()
    }
}

/// Distinct values in order of first appearance.
pub fn distinct(keys: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for k in keys {
        if !out.contains(k) {
            out.push(k.clone());
        }
    }
    out
}
