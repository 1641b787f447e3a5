//! Tables, CSV and JSON emission.

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

/// Fixed column order of `sweep`.
pub const SWEEP_COLUMNS: [&str; 9] = [
    "Y",
    "ratio_lower",
    "ratio_upper",
    "ratio_lhy",
    "ratio_dyson_lower",
    "eps",
    "R_over_a",
    "ell_over_a",
    "fitted_C",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// Shortest round-trip digits; exponent form outside `[1e-4, 1e6)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-4..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    Value::Object(
                        self.columns
                            .iter()
                            .cloned()
                            .zip(r.iter().map(Cell::json))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| if let Cell::Num(x) = r[i] { x } else { f64::NAN })
                .collect(),
        )
    }
}

/// What a command produced: a table for CSV and a JSON body.
pub struct Report {
    pub table: Table,
    pub body: Value,
    /// `(x column, y columns)` to draw with `--plot`
    pub plot: Option<(&'static str, Vec<&'static str>)>,
    /// reported after the output is written
    pub failure: Option<CliError>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        let body = serde_json::json!({ "rows": table.to_json_rows() });
        Self {
            table,
            body,
            plot: None,
            failure: None,
        }
    }

    pub fn with_body(table: Table, body: impl Serialize) -> Self {
        let body = serde_json::to_value(body).unwrap_or(Value::Null);
        Self {
            table,
            body,
            plot: None,
            failure: None,
        }
    }

    /// JSON document: the resolved configuration plus the result body.
    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let mut doc = serde_json::Map::new();
        doc.insert(
            "config".into(),
            serde_json::to_value(cfg).unwrap_or(Value::Null),
        );
        doc.insert("result".into(), self.body.clone());
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).unwrap_or_default();
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [1e-14, 0.1234567890123, 1.0, 7.5e8, -3.2e-7, 0.0] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(1e-14), "1e-14");
        assert_eq!(fmt_num(0.5), "0.5");
    }

    #[test]
    fn csv_quotes_text() {
        let mut t = Table::new(&["name", "v"]);
        t.push(vec![Cell::Text("a, b".into()), Cell::Num(2.0)]);
        assert_eq!(t.to_csv(), "name,v\n\"a, b\",2\n");
        assert_eq!(t.column("v").unwrap(), vec![2.0]);
    }
}
