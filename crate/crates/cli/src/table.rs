//! Column-ordered tables and their CSV form.

use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits, `inf`/`-inf`/`nan` for the non-finite values.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 {
        // no "-0" in the output
        format!("{:.16e}", 0.0)
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(v) => *v,
                    Cell::Text(t) => parse_float(t).unwrap_or(f64::NAN),
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::usage(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            let fields = row.iter().map(|c| match c {
                Cell::Num(v) => format_float(*v),
                Cell::Text(t) => t.clone(),
            });
            w.write_record(fields).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::usage(format!("csv: {e}")))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let header = r
            .headers()
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            rows.push(rec.iter().map(|f| Cell::Text(f.to_string())).collect());
        }
        Ok(Self { header, rows })
    }
}
