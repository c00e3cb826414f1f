//! CSV and JSON emission.
//!
//! Every CSV starts with `# laguerre-difmat v1, family=<tag>, alpha=<a>,
//! npts=<n>, order=<l>`. Reals are written with a fixed number of significant
//! digits; JSON carries the same rounded values, so both formats of one run
//! parse to identical numbers.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputSpec {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Significant digits for reals; 17 round-trips binary64 exactly.
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u8).range(6..=17))]
    pub precision: u8,
}

impl OutputSpec {
    /// `v` as written at this precision.
    pub fn text(&self, v: f64) -> String {
        format!("{:.*e}", self.precision as usize - 1, v)
    }

    /// `v` rounded to this precision.
    pub fn round(&self, v: f64) -> f64 {
        self.text(v).parse().expect("formatted float parses")
    }

    fn json_real(&self, v: f64) -> Value {
        // serde_json writes non-finite values as null
        json!(self.round(v))
    }

    pub fn write(&self, body: &str) -> io::Result<()> {
        match &self.output {
            Some(p) => fs::write(p, body),
            None => io::stdout().lock().write_all(body.as_bytes()),
        }
    }
}

/// Identifies the run in the CSV header and the JSON object.
#[derive(Debug, Clone)]
pub struct Meta {
    pub family: String,
    pub alpha: f64,
    pub npts: String,
    pub order: usize,
}

impl Meta {
    pub fn header(&self) -> String {
        format!(
            "# laguerre-difmat v1, family={}, alpha={}, npts={}, order={}",
            self.family, self.alpha, self.npts, self.order
        )
    }

    fn json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("family".into(), json!(self.family));
        m.insert("alpha".into(), json!(self.alpha));
        let npts = self.npts.parse::<u64>().map_or_else(|_| json!(self.npts), |n| json!(n));
        m.insert("npts".into(), npts);
        m.insert("order".into(), json!(self.order));
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    /// Written as an empty CSV field and a JSON null.
    Missing,
}

/// A column with its CSV heading and JSON key.
#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub csv: &'static str,
    pub json: &'static str,
}

pub const fn col(csv: &'static str, json: &'static str) -> Column {
    Column { csv, json }
}

/// Column-oriented table. CSV has a heading line after the header; JSON
/// holds one array per column.
#[derive(Debug, Clone)]
pub struct Table {
    pub meta: Meta,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn render(&self, out: &OutputSpec) -> String {
        match out.format {
            Format::Csv => {
                let mut s = self.meta.header();
                s.push('\n');
                let heads: Vec<&str> = self.columns.iter().map(|c| c.csv).collect();
                s.push_str(&heads.join(","));
                s.push('\n');
                for row in &self.rows {
                    let fields: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Int(i) => i.to_string(),
                            Cell::Real(v) => out.text(*v),
                            Cell::Text(t) => t.clone(),
                            Cell::Missing => String::new(),
                        })
                        .collect();
                    s.push_str(&fields.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let mut m = self.meta.json();
                for (i, c) in self.columns.iter().enumerate() {
                    let values: Vec<Value> = self
                        .rows
                        .iter()
                        .map(|row| match &row[i] {
                            Cell::Int(v) => json!(v),
                            Cell::Real(v) => out.json_real(*v),
                            Cell::Text(t) => json!(t),
                            Cell::Missing => Value::Null,
                        })
                        .collect();
                    m.insert(c.json.into(), Value::Array(values));
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json");
                s.push('\n');
                s
            }
        }
    }
}

/// Dense matrix output: CSV rows of entries, JSON `matrix` as nested arrays.
pub fn render_matrix(meta: &Meta, mode: &str, rows: usize, cols: usize, data: &[f64], out: &OutputSpec) -> String {
    match out.format {
        Format::Csv => {
            let mut s = meta.header();
            s.push('\n');
            for r in 0..rows {
                let fields: Vec<String> = data[r * cols..(r + 1) * cols].iter().map(|v| out.text(*v)).collect();
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut m = meta.json();
            m.insert("mode".into(), json!(mode));
            let matrix: Vec<Value> = (0..rows)
                .map(|r| {
                    Value::Array(
                        data[r * cols..(r + 1) * cols]
                            .iter()
                            .map(|v| out.json_real(*v))
                            .collect(),
                    )
                })
                .collect();
            m.insert("matrix".into(), Value::Array(matrix));
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json");
            s.push('\n');
            s
        }
    }
}
