//! Deterministic CSV / JSON rendering with 17 significant digits.

use serde_json::{Map, Number, Value};

use crate::config::Format;

/// `d.dddddddddddddddde±x`: 17 significant digits, explicit exponent sign.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.16e}");
    match s.split_once('e') {
        Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
        _ => s,
    }
}

/// JSON number carrying exactly the text of [`fmt_num`]; `null` if not finite.
pub fn json_num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let n: Number = serde_json::from_str(&fmt_num(v)).expect("formatted float is valid JSON");
    Value::Number(n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            Self::Num(v) => fmt_num(*v),
            Self::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Int(i) => Value::from(*i),
            Self::Num(v) => json_num(*v),
            Self::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
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

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column (`Int` cells are widened).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Int(v) => *v as f64,
                    Cell::Num(v) => *v,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

/// A table plus a metadata object describing how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub metadata: Map<String, Value>,
    pub table: Table,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => render_csv(&self.table),
            Format::Json => {
                let mut root = Map::new();
                root.insert("metadata".into(), Value::Object(self.metadata.clone()));
                root.insert(
                    "columns".into(),
                    Value::Array(self.table.columns.iter().map(|c| Value::from(c.as_str())).collect()),
                );
                root.insert(
                    "rows".into(),
                    Value::Array(
                        self.table
                            .rows
                            .iter()
                            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                            .collect(),
                    ),
                );
                let mut s = serde_json::to_string(&Value::Object(root)).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

pub fn render_csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
