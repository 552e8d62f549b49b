//! Result tables and their CSV / JSON encodings.
//!
//! Floats are written with 17 significant digits so they read back exactly.
//! Non-finite values are spelled `inf`, `-inf` and `nan` (strings in JSON).
//! CSV metadata follows the rows as `# key=value` lines; the last line holds
//! the generation time and is the only part that varies between runs.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Map, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Text,
    Bool,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Int => "int",
            Kind::Float => "float",
            Kind::Text => "text",
            Kind::Bool => "bool",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn kind(&self) -> Kind {
        match self {
            Cell::Int(_) => Kind::Int,
            Cell::Float(_) => Kind::Float,
            Cell::Text(_) => Kind::Text,
            Cell::Bool(_) => Kind::Bool,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format_float(*x)),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<(String, Kind)>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: BTreeMap<String, String>,
}

impl ResultTable {
    pub fn new(columns: &[(&str, Kind)]) -> Self {
        Self {
            columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        for (cell, (name, kind)) in row.iter().zip(&self.columns) {
            assert_eq!(cell.kind(), *kind, "column {name}");
        }
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn column(&self, name: &str) -> Vec<&Cell> {
        let i = self
            .column_index(name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| &r[i]).collect()
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        self.column(name)
            .into_iter()
            .map(|c| c.as_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Header, rows and metadata; identical bytes for identical tables.
    pub fn csv_body(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|(n, _)| n.as_str()))
            .expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        let mut out = w.into_inner().expect("in-memory flush");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }

    pub fn write_csv(&self, mut sink: impl Write, generated_at: &str) -> std::io::Result<()> {
        sink.write_all(&self.csv_body())?;
        writeln!(sink, "# generated_at={generated_at}")
    }

    /// Key-sorted document without any timestamp.
    pub fn to_json(&self) -> String {
        let cols: Vec<Json> = self
            .columns
            .iter()
            .map(|(n, k)| json!({"name": n, "type": k.name()}))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Json> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|((n, _), c)| (n.clone(), c.json()))
                    .collect();
                Json::Object(m)
            })
            .collect();
        let doc = json!({"columns": cols, "rows": rows, "metadata": self.metadata});
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }
}

/// Strips the trailing `# generated_at=` line from CSV output.
pub fn without_footer(text: &str) -> &str {
    match text.trim_end_matches('\n').rfind('\n') {
        Some(i) if text[i + 1..].starts_with("# generated_at=") => &text[..=i],
        _ => text,
    }
}
