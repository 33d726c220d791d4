//! Uniform output documents: a summary plus named tables, rendered as JSON
//! or CSV with the resolved configuration and tool version embedded.

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};

use crate::config::{Format, RunConfig};

pub const TOOL: &str = "hyperwalk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One value in a summary or table.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Json(serde_json::Value),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// Doubles in CSV carry 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(x) => format_f64(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Json(v) => v.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Float(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Float(x) => s.serialize_str(&format_f64(*x)),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Json(v) => v.serialize(s),
            Cell::Missing => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Table", 2)?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("rows", &self.rows)?;
        st.end()
    }
}

/// The result of one subcommand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub summary: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
}

struct Pairs<'a, T>(&'a [(String, T)]);

impl<T: Serialize> Serialize for Pairs<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Report {
    pub fn set(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn add(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn render(&self, config: &RunConfig) -> Vec<u8> {
        match config.format() {
            Format::Json => self.render_json(config),
            Format::Csv => self.render_csv(config),
        }
    }

    fn render_json(&self, config: &RunConfig) -> Vec<u8> {
        let tables: Vec<(String, &Table)> = self.tables.iter().map(|t| (t.name.clone(), t)).collect();
        let doc = serde_json::json!({
            "tool": TOOL,
            "version": VERSION,
            "config": config,
            "summary": serde_json::to_value(Pairs(&self.summary)).expect("summary serializes"),
            "tables": serde_json::to_value(Pairs(&tables)).expect("tables serialize"),
        });
        let mut out = serde_json::to_vec_pretty(&doc).expect("documents serialize");
        out.push(b'\n');
        out
    }

    fn render_csv(&self, config: &RunConfig) -> Vec<u8> {
        let mut out = format!(
            "# {TOOL} {VERSION}\n# config {}\n",
            serde_json::to_string(config).expect("configs serialize")
        )
        .into_bytes();
        let mut summary = Table::new("summary", &["key", "value"]);
        for (k, v) in &self.summary {
            summary.push(vec![Cell::Text(k.clone()), v.clone()]);
        }
        for table in std::iter::once(&summary).chain(&self.tables) {
            out.extend_from_slice(format!("# table {}\n", table.name).as_bytes());
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv_text)).expect("in-memory write");
            }
            out.extend(w.into_inner().expect("in-memory flush"));
        }
        out
    }
}
