//! Row tables and their CSV / JSON-lines encodings.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One cell. Numbers keep their fixed decimal text so output is byte-stable.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(String),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// A rate: twelve digits after the point.
    pub fn lambda(x: f64) -> Cell {
        Cell::Num(format!("{x:.12}"))
    }

    /// A probability or polynomial value: fifteen significant digits.
    pub fn value(x: f64) -> Cell {
        Cell::Num(format!("{x:.14e}"))
    }

    pub fn int(n: usize) -> Cell {
        Cell::Int(n as i64)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => Value::from(*n),
            Cell::Num(s) => s
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or_else(|| Value::String(s.clone()), Value::Number),
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

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv_text))?;
                }
                w.flush()?;
            }
            Format::Json => {
                for row in &self.rows {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    serde_json::to_writer(&mut *out, &Value::Object(obj))?;
                    out.write_all(b"\n")?;
                }
            }
        }
        Ok(())
    }

    pub fn to_string(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

/// Parsed rows of a previously emitted file, as column name to text.
pub fn read_rows(text: &str) -> Result<Vec<Vec<(String, String)>>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let mut rows = Vec::new();
        for (i, line) in trimmed.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let v: Value = serde_json::from_str(line)
                .map_err(|e| CliError::Usage(format!("line {}: {e}", i + 1)))?;
            let obj = v
                .as_object()
                .ok_or_else(|| CliError::Usage(format!("line {}: expected an object", i + 1)))?;
            rows.push(
                obj.iter()
                    .map(|(k, v)| {
                        let s = match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        };
                        (k.clone(), s)
                    })
                    .collect(),
            );
        }
        return Ok(rows);
    }
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect());
    }
    Ok(rows)
}

/// `[a,b]` intervals joined by spaces; `bare_singletons` prints `[a,a]` as `a`.
pub fn format_intervals(intervals: &[(usize, usize)], bare_singletons: bool) -> String {
    intervals
        .iter()
        .map(|&(a, b)| {
            if bare_singletons && a == b {
                a.to_string()
            } else {
                format!("[{a},{b}]")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn format_set(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_formats() {
        assert_eq!(Cell::lambda(3f64.sqrt() - 1.0).csv_text(), "0.732050807569");
        assert_eq!(Cell::value(1.5).csv_text(), "1.50000000000000e0");
        assert_eq!(Cell::value(1.5).json(), serde_json::json!(1.5));
    }

    #[test]
    fn intervals() {
        assert_eq!(format_intervals(&[(1, 8), (10, 14), (19, 20)], false), "[1,8] [10,14] [19,20]");
        assert_eq!(format_intervals(&[(1, 1), (3, 3)], false), "[1,1] [3,3]");
        assert_eq!(format_intervals(&[(1, 3), (9, 9)], true), "[1,3] 9");
    }
}
