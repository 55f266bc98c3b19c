//! Versioned CSV and report files.

use std::path::{Path, PathBuf};

use crate::CliError;

pub const CSV_VERSION: &str = "genbound-csv v1";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A CSV document: one `#` comment line naming the schema, a header row,
/// then the records.
pub fn csv_document(kind: &str, note: &str, header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Output(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    let mut out = format!("# {CSV_VERSION} {kind}");
    if !note.is_empty() {
        out.push(' ');
        out.push_str(note);
    }
    out.push('\n');
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

/// `runs/out.csv` → `runs/out.bounds.csv`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}
