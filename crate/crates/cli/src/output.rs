//! Result tables and the files they are written to.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use shapelab_core::functionals::csv_field;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits: enough to round-trip every f64
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => csv_field(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
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

/// Rectangular table with `# key: value` metadata lines above the header.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(header: &[&str]) -> Self {
        ResultTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(
            &self
                .header
                .iter()
                .map(|h| csv_field(h))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

/// Reads the `# config:` line back out of a CSV written by this tool.
pub fn config_echo(csv: &str) -> Option<&str> {
    csv.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# config: "))
}

/// Picks a fresh output path: the user-given name, or `<tag>-<millis>.<ext>`.
pub fn output_path(dir: &Path, name: Option<&Path>, tag: &str, ext: &str) -> PathBuf {
    match name {
        Some(n) if n.is_absolute() => n.to_path_buf(),
        Some(n) => dir.join(n),
        None => {
            let millis = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0);
            let mut path = dir.join(format!("{tag}-{millis}.{ext}"));
            let mut i = 1;
            while path.exists() {
                path = dir.join(format!("{tag}-{millis}-{i}.{ext}"));
                i += 1;
            }
            path
        }
    }
}

/// Writes `text` to a path that must not exist yet.
pub fn write_new(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut f = OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| CliError::io(path, e))
}
