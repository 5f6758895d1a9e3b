//! CSV and JSON writers.

use std::io::Write;

use serde_json::{Map, Number, Value};

use cpwall::units::REDUCED_UNITS_NOTE;

use crate::config::Format;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Seventeen significant digits, enough to reproduce the value exactly.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => String::new(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn write_table<W: Write>(
    mut out: W,
    format: Format,
    table: &Table,
    config: &[(&'static str, String)],
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# schema={SCHEMA_VERSION}")?;
            writeln!(out, "# units: {REDUCED_UNITS_NOTE}")?;
            for (k, v) in config {
                writeln!(out, "# config {k}={v}")?;
            }
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::to_csv))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("schema".into(), Value::from(SCHEMA_VERSION));
            doc.insert("units".into(), Value::from(REDUCED_UNITS_NOTE));
            let mut echo = Map::new();
            for (k, v) in config {
                match echo.get_mut(*k) {
                    Some(Value::Array(items)) => items.push(Value::from(v.as_str())),
                    Some(prev) => *prev = Value::Array(vec![prev.take(), Value::from(v.as_str())]),
                    None => {
                        echo.insert((*k).into(), Value::from(v.as_str()));
                    }
                }
            }
            doc.insert("config".into(), Value::Object(echo));
            doc.insert("columns".into(), Value::from(table.columns.clone()));
            let rows = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        table.columns.iter().zip(row).map(|(c, v)| ((*c).to_string(), v.to_json())).collect();
                    Value::Object(obj)
                })
                .collect();
            doc.insert("rows".into(), Value::Array(rows));
            serde_json::to_writer_pretty(&mut out, &Value::Object(doc))?;
            writeln!(out)?;
        }
    }
    Ok(())
}
