//! Plain-text matrix files.
//!
//! One row per line, comma separated, shortest round-trip decimal
//! representation of each `f64`. A subspace file holds its `n × k` basis.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grassmann::Subspace;

/// Loaded bases whose re-orthonormalization moved them by more than this
/// are flagged as corrected.
pub const CORRECTION_TOL: f64 = 1e-8;

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::with_capacity(m.len() * 22);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            // `{}` on f64 is the shortest string that parses back exactly.
            let _ = write!(out, "{}", m[(i, j)]);
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, field)| {
                field.trim().parse::<f64>().map_err(|e| {
                    parse_err(format!(
                        "row {}, column {}: cannot parse {:?} ({e})",
                        lineno + 1,
                        col + 1,
                        field.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(format!(
                    "row {} has {} columns, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err("no rows".into()));
    }
    let (n, k) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(n, k, |i, j| rows[i][j]))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    fs::write(path, matrix_to_csv(m)).map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    matrix_from_csv(&text, path)
}

/// A subspace read from disk, plus whether its stored basis needed a
/// correction larger than [`CORRECTION_TOL`] to become orthonormal.
#[derive(Debug, Clone)]
pub struct LoadedSubspace {
    pub subspace: Subspace,
    pub corrected: bool,
}

pub fn read_subspace(path: &Path) -> Result<LoadedSubspace> {
    let raw = read_matrix(path)?;
    // A basis that is already orthonormal is kept bit-for-bit.
    if let Ok(subspace) = Subspace::new(raw.clone()) {
        return Ok(LoadedSubspace {
            subspace,
            corrected: false,
        });
    }
    let subspace = Subspace::orthonormalize(&raw).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let corrected = (subspace.basis() - &raw).norm() > CORRECTION_TOL;
    Ok(LoadedSubspace {
        subspace,
        corrected,
    })
}

pub fn write_subspace(path: &Path, s: &Subspace) -> Result<()> {
    write_matrix(path, s.basis())
}

/// CSV table with a header row.
pub fn table_to_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
