//! Report rendering: versioned JSON, aligned text tables, or CSV.

use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::CliError;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (expected table, json or csv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: Vec<&str>) -> Self {
        Self::with_headers(title, headers.into_iter().map(String::from).collect())
    }

    pub fn with_headers(title: impl Into<String>, headers: Vec<String>) -> Self {
        Self {
            title: title.into(),
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A finished report: the JSON document plus its tabular view.
#[derive(Debug, Clone)]
pub struct Report {
    json: String,
    tables: Vec<Table>,
}

#[derive(Serialize)]
struct Envelope<'a, B: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a B,
}

impl Report {
    pub fn new<B: Serialize>(command: &str, body: &B, tables: Vec<Table>) -> Result<Self, CliError> {
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            body,
        };
        Ok(Self {
            json: serde_json::to_string_pretty(&envelope)?,
            tables,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", self.json),
            Format::Table => self.tables.iter().map(render_text).collect::<Vec<_>>().join("\n"),
            Format::Csv => self.tables.iter().map(render_csv).collect::<Vec<_>>().join("\n"),
        }
    }
}

fn render_text(table: &Table) -> String {
    let mut widths: Vec<usize> = table.headers.iter().map(|h| h.len()).collect();
    for row in &table.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    if !table.title.is_empty() {
        let _ = writeln!(out, "{}", table.title);
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let _ = writeln!(out, "{}", line(table.headers.iter().map(String::as_str).collect()));
    for row in &table.rows {
        let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    if !table.title.is_empty() {
        let _ = writeln!(out, "# {}", table.title);
    }
    let _ = writeln!(out, "{}", table.headers.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| {
                if c.contains([',', '"', '\n']) {
                    format!("\"{}\"", c.replace('"', "\"\""))
                } else {
                    c.clone()
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Fixed-precision number cell.
pub fn num(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    // avoid "-0.000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}
