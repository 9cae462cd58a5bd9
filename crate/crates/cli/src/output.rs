//! Artifact rendering. Every artifact starts with the tool version and the
//! full run configuration, so identical invocations give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::args::{Cli, Format};
use crate::error::{CliError, CliResult};

pub const TOOL: &str = "locc-distill";

/// A CSV table held as already-formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// One command's result in all three renderings.
pub struct Output {
    pub result: serde_json::Value,
    pub table: Table,
    pub text: String,
}

impl Output {
    pub fn new<T: Serialize>(result: &T, table: Table, text: String) -> Self {
        Self { result: serde_json::to_value(result).expect("plain data serializes"), table, text }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Cli,
    result: &'a serde_json::Value,
}

fn config_line(cli: &Cli) -> String {
    serde_json::to_string(cli).expect("config serializes")
}

pub fn render_json(cli: &Cli, result: &serde_json::Value) -> String {
    let env = Envelope { tool: TOOL, version: locc_distill::VERSION, config: cli, result };
    let mut s = serde_json::to_string_pretty(&env).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn render_csv(cli: &Cli, table: &Table) -> CliResult<String> {
    let mut out = format!("# {TOOL} {} config={}\n", locc_distill::VERSION, config_line(cli));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    out.push_str(&String::from_utf8(bytes).expect("cells are UTF-8"));
    Ok(out)
}

pub fn render_text(cli: &Cli, body: &str) -> String {
    format!("# {TOOL} {}\n# config {}\n{body}", locc_distill::VERSION, config_line(cli))
}

pub fn render(cli: &Cli, out: &Output) -> CliResult<String> {
    match cli.format {
        Format::Json => Ok(render_json(cli, &out.result)),
        Format::Csv => render_csv(cli, &out.table),
        Format::Text => Ok(render_text(cli, &out.text)),
    }
}

pub fn write_to(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

/// Full-precision cell.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Aligned `key value` lines with six-decimal numbers.
#[derive(Default)]
pub struct TextBlock {
    lines: Vec<(String, String)>,
}

impl TextBlock {
    pub fn num(&mut self, key: &str, x: f64) -> &mut Self {
        self.lines.push((key.to_string(), format!("{x:.6}")));
        self
    }

    pub fn raw(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.lines.push((key.to_string(), v.to_string()));
        self
    }

    pub fn finish(&self) -> String {
        let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (k, v) in &self.lines {
            writeln!(s, "{k:<width$}  {v}").expect("string write");
        }
        s
    }
}
