//! Result tables and their CSV / JSON encodings.

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Number(v) => format!("{v:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // serde_json writes non-finite numbers as null
            Cell::Number(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub quantity: String,
    pub constants: qfed::PhysicalConstants,
}

impl Meta {
    pub fn new(quantity: &str, config_text: &str, constants: qfed::PhysicalConstants) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config_sha256: hex::encode(Sha256::digest(config_text.as_bytes())),
            quantity: quantity.to_owned(),
            constants,
        }
    }

    pub fn for_config(cfg: &RunConfig) -> Result<Self> {
        Ok(Self::new(cfg.quantity.name(), &cfg.to_toml()?, qfed::PhysicalConstants::default()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub meta: Meta,
    pub columns: Vec<String>,
    pub units: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(meta: Meta, columns: &[(&str, &str)]) -> Self {
        Self {
            meta,
            columns: columns.iter().map(|(c, _)| (*c).to_owned()).collect(),
            units: columns.iter().map(|(_, u)| (*u).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            bail!("row has {} cells, table has {} columns", row.len(), self.columns.len());
        }
        self.rows.push(row);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Encodes a table. CSV carries a header row and a `#`-prefixed units row;
/// JSON carries `meta`, `columns`, `units` and `rows`.
pub fn emit(table: &ResultTable, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(false).from_writer(Vec::new());
            w.write_record(&table.columns)?;
            let mut units = table.units.clone();
            if let Some(first) = units.first_mut() {
                first.insert(0, '#');
            }
            w.write_record(&units)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            Ok(w.into_inner().map_err(|e| e.into_error())?)
        }
        Format::Json => {
            let doc = json!({
                "meta": table.meta,
                "columns": table.columns,
                "units": table.units,
                "rows": table.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
