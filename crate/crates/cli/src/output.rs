//! CSV and JSON writers with a self-describing metadata header.

use std::io::Write;

use serde_json::{json, Map, Value as Json};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(Option<f64>),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(Some(v))
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(Some(v)) => format_number(*v),
            Cell::Num(None) => "nan".to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Num(Some(v)) => json!(v),
            Cell::Num(None) => Json::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

#[derive(Debug, Clone, Default)]
pub struct Output {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `key = value` header entries.
    pub meta: Vec<(String, String)>,
    pub summary: Option<Json>,
    /// Points that failed numerically; the artifact is still written.
    pub failures: Vec<String>,
}

fn header_lines(config: &RunConfig, out: &Output, generated: u64) -> Vec<String> {
    let mut lines = vec![
        format!("atomcoh {}", env!("CARGO_PKG_VERSION")),
        format!("command = {}", config.subcommand.name()),
        format!("generated_unix = {generated}"),
    ];
    for (k, v) in &config.params {
        lines.push(format!("param {k} = {v}"));
    }
    for (k, v) in constants_map(config) {
        lines.push(format!("constant {k} = {v:e}"));
    }
    for (k, v) in &config.constant_overrides {
        lines.push(format!("override const_{k} = {v}"));
    }
    for (k, v) in &out.meta {
        lines.push(format!("{k} = {v}"));
    }
    if let Some(s) = &out.summary {
        lines.push(format!("summary = {s}"));
    }
    lines
}

fn constants_map(config: &RunConfig) -> Vec<(&'static str, f64)> {
    let c = &config.constants;
    vec![
        ("hbar", c.hbar),
        ("m_e", c.m_e),
        ("m_p", c.m_p),
        ("m_n", c.m_n),
        ("m_alpha", c.m_alpha),
        ("a_b", c.a_b),
        ("e2_coulomb", c.e2_coulomb),
        ("ev", c.ev),
    ]
}

pub fn render(config: &RunConfig, out: &Output, generated: u64) -> String {
    match config.format {
        Format::Csv => render_csv(config, out, generated),
        Format::Json => render_json(config, out, generated),
    }
}

fn render_csv(config: &RunConfig, out: &Output, generated: u64) -> String {
    let mut s = String::new();
    for line in header_lines(config, out, generated) {
        s.push_str("# ");
        s.push_str(&line);
        s.push('\n');
    }
    s.push_str(&out.columns.join(","));
    s.push('\n');
    for row in &out.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn render_json(config: &RunConfig, out: &Output, generated: u64) -> String {
    let params: Map<String, Json> = config
        .params
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v.to_string())))
        .collect();
    let constants: Map<String, Json> = constants_map(config)
        .into_iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let meta: Map<String, Json> = out.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let rows: Vec<Json> = out
        .rows
        .iter()
        .map(|r| Json::Array(r.iter().map(Cell::json).collect()))
        .collect();
    let doc = json!({
        "tool": "atomcoh",
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.subcommand.name(),
        "generated_unix": generated,
        "parameters": params,
        "constants": constants,
        "meta": meta,
        "summary": out.summary.clone().unwrap_or(Json::Null),
        "columns": out.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values are finite or null");
    s.push('\n');
    s
}

pub fn write_to(mut w: impl Write, text: &str) -> std::io::Result<()> {
    w.write_all(text.as_bytes())?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0), "1.00000000000e0");
        assert_eq!(format_number(-0.000123456789012345), "-1.23456789012e-4");
        let v = 6.02214076e23_f64;
        assert_eq!(format_number(v).parse::<f64>().unwrap(), 6.02214076e23);
    }

    #[test]
    fn missing_values() {
        assert_eq!(Cell::Num(None).csv(), "nan");
        assert_eq!(Cell::Num(None).json(), Json::Null);
    }
}
