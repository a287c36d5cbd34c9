//! Flat result rows and their CSV / JSON renderings.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use stackelberg::{EquilibriumProfile, GridSpec, PayoffReport};

use crate::config::RunConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Value {
    /// CSV cell. `f64`'s `Display` is the shortest string that parses back
    /// to the same value.
    fn cell(&self) -> String {
        match self {
            Value::Num(x) => x.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Num(x) => s.serialize_f64(*x),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Text(t) => s.serialize_str(t),
        }
    }
}

/// Ordered `(column, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(&'static str, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, column: &'static str, x: f64) -> Self {
        self.0.push((column, Value::Num(x)));
        self
    }

    pub fn flag(mut self, column: &'static str, b: bool) -> Self {
        self.0.push((column, Value::Bool(b)));
        self
    }

    pub fn text(mut self, column: &'static str, t: impl ToString) -> Self {
        self.0.push((column, Value::Text(t.to_string())));
        self
    }

    pub fn profile(self, p: &EquilibriumProfile) -> Self {
        self.num("x_a", p.x_a)
            .num("x_bh", p.x_bh)
            .num("x_bl", p.x_bl)
    }

    pub fn payoffs(self, p: &PayoffReport) -> Self {
        self.num("u_a", p.u_a)
            .num("u_bh", p.u_bh)
            .num("u_bl", p.u_bl)
            .num("u_b", p.u_b)
    }

    pub fn columns(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.iter().map(|(c, _)| *c)
    }

    pub fn get(&self, column: &str) -> Option<&Value> {
        self.0.iter().find(|(c, _)| *c == column).map(|(_, v)| v)
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (column, value) in &self.0 {
            map.serialize_entry(column, value)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct Meta {
    version: &'static str,
    grid: Option<GridSpec>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: &'a RunConfig,
    results: &'a [Record],
    meta: Meta,
}

/// One JSON object with the run's config, its rows and metadata.
pub fn to_json(config: &RunConfig, records: &[Record], grid: Option<GridSpec>) -> Result<String> {
    let envelope = Envelope {
        config,
        results: records,
        meta: Meta {
            version: env!("CARGO_PKG_VERSION"),
            grid,
        },
    };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(std::io::Error::from)?;
    text.push('\n');
    Ok(text)
}

/// Header row plus one line per record; all records share the first one's
/// columns.
pub fn to_csv(records: &[Record]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    if let Some(first) = records.first() {
        writer.write_record(first.columns())?;
    }
    for record in records {
        debug_assert!(record.columns().eq(records[0].columns()));
        writer.write_record(record.0.iter().map(|(_, v)| v.cell()))?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("cells are UTF-8"))
}
