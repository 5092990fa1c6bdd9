use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::Result;

/// A named CSV table; values are pre-formatted strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = Cell>>(&mut self, row: I) {
        let row: Vec<String> = row.into_iter().map(|c| c.0).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Column values parsed back as numbers; empty cells become NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect())
    }
}

/// One CSV cell.
pub struct Cell(pub String);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell(if v.is_finite() { format!("{v}") } else { String::new() })
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell(v.to_string())
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell(v.to_string())
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell(v)
    }
}
impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map(Cell::from).unwrap_or(Cell(String::new()))
    }
}

/// Builds a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::scenario::Cell::from($v)),*] };
}

/// Tables plus a JSON summary, and the resolved configuration they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub config: Value,
    pub seed: u64,
    pub tables: Vec<Table>,
    pub summary: Value,
}

impl Artifacts {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Writes `<prefix><table>.csv` files and `<prefix>summary.json`; returns the written paths.
pub fn write_artifacts(art: &Artifacts, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let config_line = serde_json::to_string(&art.config)?;
    let mut written = Vec::new();
    for t in &art.tables {
        let path = dir.join(format!("{prefix}{}.csv", t.name));
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(f, "# ramsey-noise {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(f, "# seed: {}", art.seed)?;
        writeln!(f, "# config: {config_line}")?;
        let mut w = csv::Writer::from_writer(f);
        w.write_record(&t.header)?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        written.push(path);
    }
    let path = dir.join(format!("{prefix}summary.json"));
    let doc = serde_json::json!({ "config": art.config, "seed": art.seed, "summary": art.summary });
    std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
    written.push(path);
    Ok(written)
}
