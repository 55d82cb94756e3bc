//! Table emitters: comma-separated text or one JSON object per line, both
//! preceded by a `#` line echoing the run parameters.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Records,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Empty,
}

/// Twelve significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => format_number(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
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
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, out: &mut dyn Write, header: &Value, format: Format) -> io::Result<()> {
        writeln!(out, "# {header}")?;
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Records => {
                for row in &self.rows {
                    let record: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.json()))
                        .collect();
                    writeln!(out, "{}", Value::Object(record))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.48688095871336786), "4.86880958713e-1");
        assert_eq!(format_number(-2.0), "-2.00000000000e0");
    }

    #[test]
    fn csv_and_records() {
        let mut t = Table::new(vec!["a", "b", "c"]);
        t.push(vec![Cell::Num(1.5), Cell::Bool(true), Cell::Empty]);
        let mut csv = Vec::new();
        t.write(&mut csv, &json!({"k": 1}), Format::Csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "# {\"k\":1}\na,b,c\n1.50000000000e0,true,\n"
        );
        let mut rec = Vec::new();
        t.write(&mut rec, &json!({"k": 1}), Format::Records).unwrap();
        assert_eq!(
            String::from_utf8(rec).unwrap(),
            "# {\"k\":1}\n{\"a\":1.5,\"b\":true,\"c\":null}\n"
        );
    }
}
