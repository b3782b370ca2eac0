//! Column-ordered tables written as CSV or JSON with identical values.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Number, Value};

use super::config::Format;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// A float cell; non-finite values become null.
pub fn num(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

pub fn int(x: u64) -> Value {
    Value::Number(x.into())
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes to `out`, or to stdout when `out` is `None`.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let body = self.render(format);
        match out {
            Some(path) => fs::write(path, body),
            None => io::stdout().lock().write_all(body.as_bytes()),
        }
    }

    /// Reads a CSV written by [`Table::to_csv`]. Cells that parse as numbers
    /// become numbers; empty cells become null.
    pub fn from_csv(body: &str) -> Result<Table, csv::Error> {
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            rows.push(
                rec.iter()
                    .map(|cell| {
                        if cell.is_empty() {
                            Value::Null
                        } else if let Ok(n) = cell.parse::<u64>() {
                            int(n)
                        } else if let Ok(x) = cell.parse::<f64>() {
                            num(x)
                        } else {
                            text(cell)
                        }
                    })
                    .collect(),
            );
        }
        Ok(Table { columns, rows })
    }
}
