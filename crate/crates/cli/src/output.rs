//! Rendering of command results as text, CSV, markdown or JSON.

use std::fmt::Write as _;

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
    Markdown,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Self { title: title.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// What a command produces: the JSON payload plus a tabular view of it.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub tables: Vec<Table>,
    pub summary: Option<String>,
    /// `false` turns into exit code 1
    pub ok: bool,
}

impl Report {
    pub fn new(json: Value, tables: Vec<Table>) -> Self {
        Self { json, tables, summary: None, ok: true }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values always serialise");
                s.push('\n');
                s
            }
            Format::Text => self.render_with(text_table, |s| format!("{s}\n")),
            Format::Csv => self.render_with(csv_table, |s| format!("# {s}\n")),
            Format::Markdown => self.render_with(markdown_table, |s| format!("**{s}**\n")),
        }
    }

    fn render_with(&self, table: fn(&Table) -> String, summary: impl Fn(&str) -> String) -> String {
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&table(t));
        }
        if let Some(s) = &self.summary {
            if !self.tables.is_empty() {
                out.push('\n');
            }
            out.push_str(&summary(s));
        }
        out
    }
}

fn text_table(t: &Table) -> String {
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> =
            cells.iter().zip(&widths).map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = format!("{}\n{}\n", t.title, line(&t.headers));
    for row in &t.rows {
        let _ = writeln!(out, "{}", line(row));
    }
    if t.rows.is_empty() {
        out.push_str("(none)\n");
    }
    out
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn csv_table(t: &Table) -> String {
    let mut out = format!("# {}\n", t.title);
    let line = |cells: &[String]| cells.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "{}", line(&t.headers));
    for row in &t.rows {
        let _ = writeln!(out, "{}", line(row));
    }
    out
}

fn markdown_table(t: &Table) -> String {
    let esc = |c: &String| c.replace('|', "\\|");
    let mut out = format!("### {}\n\n", t.title);
    let _ = writeln!(out, "| {} |", t.headers.iter().map(esc).collect::<Vec<_>>().join(" | "));
    let _ = writeln!(out, "|{}|", t.headers.iter().map(|_| "---").collect::<Vec<_>>().join("|"));
    for row in &t.rows {
        let _ = writeln!(out, "| {} |", row.iter().map(esc).collect::<Vec<_>>().join(" | "));
    }
    out
}
