//! Deterministic result files.
//!
//! Every command writes one or more column tables plus a `manifest.json`
//! recording the resolved parameters, summary numbers, diagnostics, and the
//! list of files written. Floats are rendered with twelve significant digits
//! (`{:.11e}`), tables use no maps or iteration-order-dependent containers,
//! and nothing consults a clock or RNG — reruns are byte-identical.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::FormatArg;
use crate::error::AppError;

/// Render a float with twelve significant digits, the precision every table
/// and manifest value carries. Missing values (`NaN`) render as `NaN` in CSV
/// and `null` in JSON.
pub fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

/// One result table: a pinned header and rows of pre-rendered cells.
#[derive(Debug)]
pub struct Table {
    /// File stem; the format decides the extension.
    pub name: &'static str,
    /// Column names, comma-joined in CSV order.
    pub header: &'static [&'static str],
    /// Rows of cells, one string per column.
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn file_name(&self, format: FormatArg) -> String {
        match format {
            FormatArg::Csv => format!("{}.csv", self.name),
            FormatArg::Json => format!("{}.json", self.name),
        }
    }

    fn write_csv(&self, path: &Path) -> Result<(), AppError> {
        let mut text = String::with_capacity(32 * (self.rows.len() + 1));
        text.push_str(&self.header.join(","));
        text.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.header.len());
            text.push_str(&row.join(","));
            text.push('\n');
        }
        write_atomic(path, text.as_bytes())
    }

    fn write_json(&self, path: &Path) -> Result<(), AppError> {
        #[derive(Serialize)]
        struct JsonTable<'a> {
            header: &'a [&'a str],
            rows: Vec<Vec<serde_json::Value>>,
        }
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|cell| cell_to_json(cell)).collect())
            .collect();
        let body = serde_json::to_vec_pretty(&JsonTable {
            header: self.header,
            rows,
        })?;
        write_atomic(path, &body)
    }
}

/// Reproduce a CSV cell as a JSON value: numbers stay numbers, `NaN` becomes
/// `null`, anything else stays a string.
fn cell_to_json(cell: &str) -> serde_json::Value {
    if cell == "NaN" {
        return serde_json::Value::Null;
    }
    match cell.parse::<f64>() {
        Ok(x) => serde_json::Number::from_f64(x)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null),
        Err(_) => serde_json::Value::String(cell.to_string()),
    }
}

/// Run manifest: everything needed to reproduce and interpret the output.
#[derive(Debug, Serialize)]
pub struct Manifest {
    /// Crate version that produced the files.
    pub version: &'static str,
    /// Command that ran.
    pub command: &'static str,
    /// Every parameter after defaults and config merging.
    pub params: serde_json::Value,
    /// Headline numbers for the run.
    pub results: serde_json::Value,
    /// Human-readable caveats (also echoed to stderr).
    pub diagnostics: Vec<String>,
    /// Files written next to this manifest.
    pub outputs: Vec<String>,
}

/// Write all tables plus the manifest into `dir`, creating it if needed.
/// Returns the file names written (manifest last).
pub fn write_run(
    dir: &Path,
    format: FormatArg,
    tables: &[Table],
    manifest: &mut Manifest,
) -> Result<Vec<String>, AppError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in tables {
        let file_name = table.file_name(format);
        let path = dir.join(&file_name);
        match format {
            FormatArg::Csv => table.write_csv(&path)?,
            FormatArg::Json => table.write_json(&path)?,
        }
        written.push(file_name);
    }
    manifest.outputs = written.clone();
    let body = serde_json::to_vec_pretty(manifest)?;
    write_atomic(&dir.join("manifest.json"), &body)?;
    written.push("manifest.json".to_string());
    Ok(written)
}

/// Write through a sibling temp file + rename so a crash never leaves a
/// half-written table behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    let mut tmp = PathBuf::from(path);
    tmp.set_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(bytes)?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
