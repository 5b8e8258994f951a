//! Deterministic CSV emission: fixed column order, 12-significant-digit
//! scientific notation for reals, and leading `#` metadata comments that are
//! present only when the table has rows.

use std::path::Path;

use crate::error::{Result, SimError};

/// One cell of a sweep table.
#[derive(Clone, Copy, Debug)]
pub enum Field {
    Int(i64),
    Float(f64),
}

/// A row type with a fixed header.
pub trait Record {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<Field>;
}

/// Formats a real with 12 significant digits; the output round-trips through
/// `str::parse::<f64>()`.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Renders metadata comments, the header, and the rows. Empty tables render
/// as the bare header line so downstream parsers always find the schema.
pub fn render_csv<R: Record>(metadata: &[(&str, String)], rows: &[R]) -> Result<String> {
    let mut out = String::new();
    if !rows.is_empty() {
        for (key, value) in metadata {
            out.push_str(&format!("# {key} = {value}\n"));
        }
    }
    out.push_str(&R::HEADER.join(","));
    out.push('\n');
    for (row_no, row) in rows.iter().enumerate() {
        let fields = row.fields();
        if fields.len() != R::HEADER.len() {
            return Err(SimError::Numerical(format!(
                "row {row_no} has {} fields, header has {}",
                fields.len(),
                R::HEADER.len()
            )));
        }
        let mut line = String::new();
        for (col, field) in fields.iter().enumerate() {
            if col > 0 {
                line.push(',');
            }
            match field {
                Field::Int(v) => line.push_str(&v.to_string()),
                Field::Float(v) => {
                    if !v.is_finite() {
                        return Err(SimError::Numerical(format!(
                            "non-finite value in column {} of row {row_no}",
                            R::HEADER[col]
                        )));
                    }
                    line.push_str(&format_float(*v));
                }
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Renders and writes a table; `path` of `-` writes to standard output.
pub fn write_csv<R: Record>(
    metadata: &[(&str, String)],
    rows: &[R],
    path: Option<&Path>,
) -> Result<()> {
    let text = render_csv(metadata, rows)?;
    match path {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
