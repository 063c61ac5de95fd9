//! CSV and JSON emission. Numbers are written with 17 significant digits;
//! masked values are `nan` in CSV and `null` in JSON.

use std::fmt::Write as _;
use std::path::Path;

use darboux_core::grid_calculus::SampledMatrix;
use darboux_core::CMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::CliError;

pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn push_complex(line: &mut String, z: Option<Complex64>) {
    let (re, im) = z.map_or((f64::NAN, f64::NAN), |z| (z.re, z.im));
    let _ = write!(line, ",{},{}", format_number(re), format_number(im));
}

/// Columns `x`, then `re_v_r_c`, `im_v_r_c` for the entries in row-major
/// order.
pub fn potential_csv(v: &SampledMatrix, n: usize) -> String {
    let mut out = String::from("x");
    for r in 0..n {
        for c in 0..n {
            let _ = write!(out, ",re_v_{r}_{c},im_v_{r}_{c}");
        }
    }
    out.push('\n');
    let grid = v.grid();
    for i in 0..grid.count() {
        out.push_str(&format_number(grid.x(i)));
        let m = v.at(i);
        for r in 0..n {
            for c in 0..n {
                push_complex(&mut out, m.map(|m| m[(r, c)]));
            }
        }
        out.push('\n');
    }
    out
}

/// Columns `x`, then `re_phi_s_j`, `im_phi_s_j` for state `s`, component `j`.
pub fn states_csv(grid: &darboux_core::grid_calculus::Grid, states: &[SampledMatrix], n: usize) -> String {
    let mut out = String::from("x");
    for s in 0..states.len() {
        for j in 0..n {
            let _ = write!(out, ",re_phi_{s}_{j},im_phi_{s}_{j}");
        }
    }
    out.push('\n');
    for i in 0..grid.count() {
        out.push_str(&format_number(grid.x(i)));
        for state in states {
            let m = state.at(i);
            for j in 0..n {
                push_complex(&mut out, m.map(|m| m[(j, 0)]));
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    write_file(path, contents)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_file(path, &text)
}

/// Reads a matrix table in the layout of [`potential_csv`]: a header row,
/// then `x` followed by `2n²` numbers per row.
pub fn read_matrix_csv(path: &Path, n: usize) -> Result<Vec<CMatrix>, CliError> {
    let table_error = |message: String| CliError::Table {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| table_error(e.to_string()))?;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| table_error(e.to_string()))?;
        if record.len() != 1 + 2 * n * n {
            return Err(table_error(format!(
                "row {}: expected {} columns, got {}",
                line + 1,
                1 + 2 * n * n,
                record.len()
            )));
        }
        let nums = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| table_error(format!("row {}: {e}", line + 1)))?;
        values.push(CMatrix::from_fn(n, n, |r, c| {
            let at = 1 + 2 * (r * n + c);
            Complex64::new(nums[at], nums[at + 1])
        }));
    }
    Ok(values)
}
