//! Matrix files.
//!
//! JSON files hold `{"dim": n, "entries": [[re, im], ...]}` in row-major
//! order. CSV files hold one `re,im` entry per line, also row-major, with the
//! dimension inferred from the entry count.

use std::fs;
use std::path::Path;

use qppkit::linalg::{
    check_density, check_hermitian, check_unitary, hermitian_residual, unitary_residual, TOL,
};
use qppkit::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

/// Structural properties detected on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatrixFlags {
    pub hermitian: bool,
    pub unitary: bool,
    pub density: bool,
}

impl MatrixFlags {
    pub fn of(m: &ComplexMatrix) -> Self {
        let hermitian = hermitian_residual(m) <= TOL.hermitian;
        Self {
            hermitian,
            unitary: unitary_residual(m) <= TOL.unitary,
            density: hermitian && check_density(m).is_ok(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedMatrix {
    pub matrix: ComplexMatrix,
    pub flags: MatrixFlags,
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a matrix and records which structural checks it passes.
pub fn load_matrix(path: impl AsRef<Path>) -> CliResult<LoadedMatrix> {
    let path = path.as_ref();
    let shown = path.display();
    let text = fs::read_to_string(path).map_err(|e| CliError::io(&shown, e))?;
    let (dim, entries) = if is_csv(path) {
        parse_csv(&text).map_err(|e| CliError::format(&shown, e))?
    } else {
        let f: MatrixFile =
            serde_json::from_str(&text).map_err(|e| CliError::format(&shown, e))?;
        (f.dim, f.entries)
    };
    if dim == 0 || entries.len() != dim * dim {
        return Err(CliError::format(
            &shown,
            format!("dimension {dim} needs {} entries, found {}", dim * dim, entries.len()),
        ));
    }
    if entries.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::format(&shown, "entries must be finite"));
    }
    let matrix =
        ComplexMatrix::from_row_iterator(dim, dim, entries.iter().map(|[re, im]| C64::new(*re, *im)));
    let flags = MatrixFlags::of(&matrix);
    Ok(LoadedMatrix { matrix, flags })
}

fn parse_csv(text: &str) -> Result<(usize, Vec<[f64; 2]>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        if record.len() != 2 {
            return Err(format!("line {}: expected 're,im', found {} cells", line + 1, record.len()));
        }
        let cell = |k: usize| {
            record[k]
                .parse::<f64>()
                .map_err(|_| format!("line {}: non-numeric cell '{}'", line + 1, &record[k]))
        };
        entries.push([cell(0)?, cell(1)?]);
    }
    let dim = (entries.len() as f64).sqrt().round() as usize;
    if dim * dim != entries.len() {
        return Err(format!("{} entries do not form a square matrix", entries.len()));
    }
    Ok((dim, entries))
}

/// Writes `m` as JSON, or as CSV when the path ends in `.csv`.
pub fn save_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> CliResult<()> {
    let path = path.as_ref();
    let shown = path.display();
    if !m.is_square() {
        return Err(CliError::Usage("only square matrices can be saved".into()));
    }
    // Row-major order; nalgebra stores columns.
    let entries: Vec<[f64; 2]> = m.transpose().iter().map(|z| [z.re, z.im]).collect();
    let text = if is_csv(path) {
        let mut w = csv::Writer::from_writer(Vec::new());
        for [re, im] in &entries {
            w.write_record([re.to_string(), im.to_string()]).map_err(|e| CliError::io(&shown, e))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(&shown, e))?;
        String::from_utf8(bytes).map_err(|e| CliError::io(&shown, e))?
    } else {
        let body = MatrixFile { dim: m.nrows(), entries };
        serde_json::to_string(&body).map_err(|e| CliError::io(&shown, e))? + "\n"
    };
    fs::write(path, text).map_err(|e| CliError::io(&shown, e))
}

pub fn load_density(path: impl AsRef<Path>) -> CliResult<ComplexMatrix> {
    let m = load_matrix(path)?.matrix;
    check_density(&m)?;
    Ok(m)
}

pub fn load_hermitian(path: impl AsRef<Path>) -> CliResult<ComplexMatrix> {
    let m = load_matrix(path)?.matrix;
    check_hermitian(&m)?;
    Ok(m)
}

pub fn load_unitary(path: impl AsRef<Path>) -> CliResult<ComplexMatrix> {
    let m = load_matrix(path)?.matrix;
    check_unitary(&m)?;
    Ok(m)
}
