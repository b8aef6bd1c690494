//! CSV and manifest writers.
//!
//! Every file starts with `#` comment lines carrying the format version and
//! the full run configuration. Floats are written with 17 significant digits
//! and lines end in LF, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(command: &str, echo: &[(String, String)]) -> String {
    let mut s = format!("# spinboson format_version={FORMAT_VERSION}\n# command={command}\n");
    for (k, v) in echo {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

/// Comment header, column row, then one line per row.
pub fn render_csv(
    command: &str,
    echo: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<Cell>],
) -> String {
    let mut s = header(command, echo);
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// Comment header followed by `key=value` lines.
pub fn render_manifest(
    command: &str,
    echo: &[(String, String)],
    entries: &[(String, String)],
) -> String {
    let mut s = header(command, echo);
    for (k, v) in entries {
        let _ = writeln!(s, "{k}={v}");
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}
