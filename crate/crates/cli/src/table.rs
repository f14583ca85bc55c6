use std::fmt;
use std::io::Write;
use std::path::Path;

use num_rational::BigRational;
use serde_json::{json, Value as Json};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Integer,
    Real,
    Rational,
    Boolean,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Integer => "integer",
            ColumnType::Real => "real",
            ColumnType::Rational => "rational",
            ColumnType::Boolean => "boolean",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Integer(i128),
    Real(f64),
    Rational(BigRational),
    Boolean(bool),
    Missing,
}

impl Cell {
    fn fits(&self, ty: ColumnType) -> bool {
        matches!(
            (self, ty),
            (Cell::Integer(_), ColumnType::Integer)
                | (Cell::Real(_), ColumnType::Real)
                | (Cell::Rational(_), ColumnType::Rational)
                | (Cell::Boolean(_), ColumnType::Boolean)
                | (Cell::Missing, _)
        )
    }

    /// CSV text: shortest round-trip decimals, rationals as `p/q`.
    pub fn text(&self) -> String {
        match self {
            Cell::Integer(v) => v.to_string(),
            Cell::Real(v) => real_text(*v),
            Cell::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
            Cell::Boolean(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Integer(v) => match i64::try_from(*v) {
                Ok(v) => json!(v),
                Err(_) => json!(v.to_string()),
            },
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Cell::Rational(_) => Json::String(self.text()),
            Cell::Boolean(b) => json!(b),
            Cell::Missing => Json::Null,
        }
    }
}

fn real_text(v: f64) -> String {
    match serde_json::Number::from_f64(v) {
        Some(n) => n.to_string(),
        None => v.to_string(),
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Integer(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Integer(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Boolean(v)
    }
}

impl From<BigRational> for Cell {
    fn from(v: BigRational) -> Self {
        Cell::Rational(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<(String, ColumnType)>,
    rows: Vec<Vec<Cell>>,
    config: ExperimentConfig,
}

impl ResultTable {
    pub fn new(config: &ExperimentConfig, columns: &[(&str, ColumnType)]) -> Self {
        Self {
            columns: columns.iter().map(|(n, t)| (n.to_string(), *t)).collect(),
            rows: Vec::new(),
            config: config.clone(),
        }
    }

    /// Panics on a row that does not match the columns; rows are built by
    /// the experiments, never from user input.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged row");
        for (cell, (name, ty)) in row.iter().zip(&self.columns) {
            assert!(cell.fits(*ty), "column {name} expects {ty}, got {cell:?}");
        }
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[(String, ColumnType)] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    pub fn seed_text(&self) -> String {
        self.config
            .parameters
            .get("seed")
            .cloned()
            .unwrap_or_else(|| "none".into())
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        out.push_str(&format!("# probrep {VERSION}\n"));
        out.push_str(&format!("# config: {}\n", self.config.echo()));
        out.push_str(&format!("# seed: {}\n", self.seed_text()));
        let types: Vec<String> = self.columns.iter().map(|(_, t)| t.to_string()).collect();
        out.push_str(&format!("# types: {}\n", types.join(",")));
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let header: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        let encode = |e: csv::Error| CliError::Compute(e.to_string());
        writer.write_record(&header).map_err(encode)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::text))
                .map_err(encode)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Compute(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Compute(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let columns: Vec<Json> = self
            .columns
            .iter()
            .map(|(n, t)| json!({"name": n, "type": t.to_string()}))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| Json::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "version": VERSION,
            "config": self.config.echo_json(),
            "seed": self.seed_text(),
            "columns": columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let unwritable = |e: std::io::Error| CliError::Unwritable {
        path: path.display().to_string(),
        reason: e.to_string(),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(unwritable)?;
    tmp.write_all(contents.as_bytes()).map_err(unwritable)?;
    tmp.persist(path).map_err(|e| unwritable(e.error))?;
    Ok(())
}
