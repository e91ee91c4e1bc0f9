//! Tabular reports and their CSV/JSON renderings.
//!
//! Floats are written as `{:.16e}` (17 significant digits) in both formats,
//! so identical inputs give byte-identical files.

use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Null,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Null, Cell::Float)
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) if x.is_finite() => {
                Value::Number(fmt_float(*x).parse::<Number>().expect("formatted float is a JSON number"))
            }
            Cell::Float(_) | Cell::Null => Value::Null,
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub label: Option<&'static str>,
    pub fields: Vec<(&'static str, Cell)>,
    pub tables: Vec<Table>,
    /// Trailing `key,value` row after a single table (CSV) / top-level key (JSON).
    pub footer: Option<(&'static str, Cell)>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self { command, label: None, fields: Vec::new(), tables: Vec::new(), footer: None }
    }

    pub fn field(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.fields.push((key, value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn write_report(report: &Report, format: Format, out: impl Write) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(report, out),
        Format::Json => write_json(report, out),
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Layout depends on shape: a lone table is written as-is (plus footer
/// row), a field-only report as `field,value`, anything else in long form
/// `section,row,field,value`.
pub fn write_csv(report: &Report, out: impl Write) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    if report.fields.is_empty() && report.tables.len() == 1 {
        let t = &report.tables[0];
        w.write_record(&t.columns)?;
        for row in &t.rows {
            w.write_record(row.iter().map(Cell::csv_text))?;
        }
        if let Some((k, v)) = &report.footer {
            w.write_record([k.to_string(), v.csv_text()])?;
        }
    } else if report.tables.is_empty() {
        w.write_record(["field", "value"])?;
        for (k, v) in &report.fields {
            w.write_record([k.to_string(), v.csv_text()])?;
        }
        if let Some((k, v)) = &report.footer {
            w.write_record([k.to_string(), v.csv_text()])?;
        }
    } else {
        w.write_record(["section", "row", "field", "value"])?;
        for (k, v) in &report.fields {
            w.write_record(["summary".to_string(), "0".into(), k.to_string(), v.csv_text()])?;
        }
        for t in &report.tables {
            for (i, row) in t.rows.iter().enumerate() {
                for (c, v) in t.columns.iter().zip(row) {
                    w.write_record([t.name.to_string(), i.to_string(), c.to_string(), v.csv_text()])?;
                }
            }
        }
        if let Some((k, v)) = &report.footer {
            w.write_record(["footer".to_string(), "0".into(), k.to_string(), v.csv_text()])?;
        }
    }
    w.flush()
}

pub fn to_json(report: &Report) -> Value {
    let mut root = Map::new();
    root.insert("command".into(), Value::from(report.command));
    if let Some(label) = report.label {
        root.insert("label".into(), Value::from(label));
    }
    let fields: Map<String, Value> = report.fields.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
    root.insert("fields".into(), Value::Object(fields));
    let mut tables = Map::new();
    for t in &report.tables {
        let rows = t
            .rows
            .iter()
            .map(|row| Value::Object(t.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        tables.insert(t.name.into(), Value::Array(rows));
    }
    root.insert("tables".into(), Value::Object(tables));
    if let Some((k, v)) = &report.footer {
        let mut f = Map::new();
        f.insert(k.to_string(), v.json());
        root.insert("footer".into(), Value::Object(f));
    }
    Value::Object(root)
}

pub fn write_json(report: &Report, mut out: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &to_json(report))?;
    out.write_all(b"\n")?;
    out.flush()
}
