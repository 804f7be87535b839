use std::io::Write;

use borromean_core::wavefunction::sci;
use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => sci(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Command result: a table whose rows all carry the config hash, plus a
/// summary that only appears in JSON output.
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), rows: Vec::new(), summary: Map::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn render(&self, format: Format, hash: &str, config: &Value, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let mut header = vec!["config_hash"];
                header.extend(&self.columns);
                w.write_record(&header)?;
                for row in &self.rows {
                    let mut rec = vec![hash.to_string()];
                    rec.extend(row.iter().map(Cell::csv));
                    w.write_record(&rec)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        m.insert("config_hash".into(), json!(hash));
                        for (c, v) in self.columns.iter().zip(row) {
                            m.insert((*c).into(), v.json());
                        }
                        Value::Object(m)
                    })
                    .collect();
                let mut doc = Map::new();
                doc.insert("config_hash".into(), json!(hash));
                doc.insert("config".into(), config.clone());
                for (k, v) in &self.summary {
                    doc.insert(k.clone(), v.clone());
                }
                doc.insert("rows".into(), Value::Array(rows));
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}
