//! Tabular reports with deterministic CSV, JSON and SVG renderings.
//!
//! CSV: comma-separated, UTF-8, LF line endings, one header row, integers
//! unquoted, reals printed with 12 significant digits. JSON: one top-level
//! object with "config", "rows" and "summary"; exact rationals appear as
//! "num/den" strings. Rendering never depends on thread count or locale,
//! so reports can serve as byte-exact fixtures.

use serde_json::{json, Map, Value};

use crate::coprime::ConvergenceRow;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    UInt(u128),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => escape_csv(s),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Int(v) => {
                if let Ok(n) = i64::try_from(*v) {
                    json!(n)
                } else {
                    json!(v.to_string())
                }
            }
            Cell::UInt(v) => {
                if let Ok(n) = u64::try_from(*v) {
                    json!(n)
                } else {
                    json!(v.to_string())
                }
            }
            Cell::Real(v) => {
                if v.is_finite() {
                    json!(v)
                } else {
                    json!(v.to_string())
                }
            }
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::UInt(v as u128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v as u128)
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::UInt(v)
    }
}

impl From<i128> for Cell {
    fn from(v: i128) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Reals rendered with 12 significant digits in scientific notation.
fn format_real(v: f64) -> String {
    format!("{v:.11e}")
}

fn escape_csv(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A report: the run configuration, a rectangular table and a summary.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            config: vec![("command".to_string(), Cell::from(command))],
            columns: Vec::new(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn config(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.config.push((key.to_string(), value.into()));
        self
    }

    pub fn columns(mut self, columns: &[&'static str]) -> Self {
        self.columns = columns.to_vec();
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn summary_cell(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Header plus one line per row, LF-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// The {"config", "rows", "summary"} object. Keys inside each object
    /// serialize in sorted order.
    pub fn to_json(&self) -> Value {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), v.json_value()))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(col, cell)| (col.to_string(), cell.json_value()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.json_value()))
            .collect();
        json!({ "config": config, "rows": rows, "summary": summary })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A minimal line chart of relative deviation against scale, log-scaled in
/// y. Self-contained SVG, no external renderer.
pub fn convergence_svg(rows: &[ConvergenceRow], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const MARGIN: f64 = 56.0;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        title
    ));
    let devs: Vec<f64> = rows
        .iter()
        .map(|r| r.relative_deviation.max(1e-300))
        .collect();
    if !devs.is_empty() {
        let ymin = devs
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .log10()
            .floor();
        let ymax = devs
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            .log10()
            .ceil();
        let yspan = (ymax - ymin).max(1.0);
        let x_at = |i: usize| {
            if rows.len() == 1 {
                W / 2.0
            } else {
                MARGIN + (W - 2.0 * MARGIN) * i as f64 / (rows.len() - 1) as f64
            }
        };
        let y_at = |d: f64| MARGIN + (H - 2.0 * MARGIN) * (ymax - d.log10()) / yspan;
        // gridlines at integer powers of ten
        let mut power = ymin as i64;
        while power <= ymax as i64 {
            let y = y_at(10f64.powi(power as i32));
            svg.push_str(&format!(
                "<line x1=\"{MARGIN:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                 stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
                W - MARGIN
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
                 text-anchor=\"end\">1e{power}</text>\n",
                MARGIN - 6.0,
                y + 4.0
            ));
            power += 1;
        }
        let points: Vec<String> = devs
            .iter()
            .enumerate()
            .map(|(i, &d)| format!("{:.2},{:.2}", x_at(i), y_at(d)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
        for (i, row) in rows.iter().enumerate() {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f77b4\"/>\n",
                x_at(i),
                y_at(devs[i])
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
                 text-anchor=\"middle\">{}</text>\n",
                x_at(i),
                H - MARGIN + 18.0,
                row.scale
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"middle\">scale</text>\n",
            W / 2.0,
            H - 12.0
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">relative deviation</text>\n",
            H / 2.0,
            H / 2.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
