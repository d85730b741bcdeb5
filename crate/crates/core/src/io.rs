//! Dense CSV files: one matrix row per line, or one value per line for vectors.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(file))
}

fn parse_err(path: &Path, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message,
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line, record) in reader(path)?.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    parse_err(path, format!("line {}: not a number: {field:?}", line + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Loads a square non-negative matrix.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let rows = read_rows(path)?;
    let m = Matrix::from_rows(rows).map_err(|e| parse_err(path, e.to_string()))?;
    if !m.is_square() {
        return Err(parse_err(
            path,
            format!("matrix is not square ({}x{})", m.rows(), m.cols()),
        ));
    }
    if let Some((i, j, v)) = m.iter_entries().find(|(_, _, v)| !(*v >= 0.0)) {
        return Err(parse_err(path, format!("negative entry {v} at ({i}, {j})")));
    }
    Ok(m)
}

/// Loads a single-column vector.
pub fn load_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    read_rows(path)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| match row.as_slice() {
            [v] => Ok(*v),
            _ => Err(parse_err(
                path,
                format!("row {}: expected one column, got {}", i + 1, row.len()),
            )),
        })
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(io_err(path))
}

pub fn write_vector_csv(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(io_err(path))?;
    for x in v {
        writeln!(file, "{x}").map_err(io_err(path))?;
    }
    Ok(())
}
