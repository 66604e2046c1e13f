use std::fmt::Write as _;

use sdpi_core::figures::Table;
use sdpi_core::format::sig;
use serde_json::{json, Value};

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => sig(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Everything a command produces, before it is rendered.
#[derive(Debug, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Structured result for `--format json`.
    pub json: Value,
    /// Extra `#` lines written after the invocation line.
    pub header: Vec<String>,
    /// Summary lines, written as trailing `#` lines in CSV.
    pub notes: Vec<String>,
    /// Printed to stderr.
    pub warnings: Vec<String>,
    /// The command answered "no": exit with the infeasibility code.
    pub infeasible: bool,
    /// Figure table, kept for the gnuplot script.
    pub plot: Option<(Table, String)>,
}

impl Report {
    /// A one-row report.
    pub fn record(fields: Vec<(&str, Cell)>, json: Value) -> Self {
        let (columns, row): (Vec<_>, Vec<_>) =
            fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Self {
            columns,
            rows: vec![row],
            json,
            ..Default::default()
        }
    }

    pub fn from_table(table: Table, title: &str) -> Self {
        let json = serde_json::to_value(&table).expect("table serializes");
        Self {
            columns: table.columns.iter().map(|c| c.to_string()).collect(),
            rows: table
                .rows
                .iter()
                .map(|r| r.iter().map(|&x| Cell::Num(x)).collect())
                .collect(),
            json,
            notes: table.summary.clone(),
            warnings: table.warnings.clone(),
            plot: Some((table, title.to_string())),
            ..Default::default()
        }
    }

    pub fn to_csv(&self, invocation: &str, seed: u64) -> String {
        let mut out = format!("# {invocation} (seed {seed})\n");
        for line in &self.header {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out
    }

    pub fn to_json(&self, invocation: &str, seed: u64) -> String {
        let doc = json!({
            "invocation": invocation,
            "seed": seed,
            "result": self.json,
            "notes": self.notes,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
        s.push('\n');
        s
    }
}
