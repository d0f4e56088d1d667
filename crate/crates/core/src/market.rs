//! Matrix Market coordinate format reader.
//!
//! Accepts the `matrix coordinate real general` flavor only. Indices in the
//! file are 1-based and converted to 0-based; lines starting with '%' are
//! skipped.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrixDual;

fn bad(msg: impl Into<String>) -> Error {
    Error::MatrixMarket(msg.into())
}

/// Reads a Matrix Market file from disk.
pub fn read_matrix_market(path: &Path) -> Result<SparseMatrixDual> {
    let file = File::open(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    parse_matrix_market(BufReader::new(file))
}

/// Parses Matrix Market data from any reader.
pub fn parse_matrix_market<R: Read>(reader: R) -> Result<SparseMatrixDual> {
    let mut lines = BufReader::new(reader).lines();

    let header = lines
        .next()
        .ok_or_else(|| bad("empty input"))?
        .map_err(Error::Io)?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" {
        return Err(bad(format!("bad header line: {header:?}")));
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(bad(format!(
            "unsupported object/format: {} {}",
            fields[1], fields[2]
        )));
    }
    if fields[3] != "real" {
        return Err(bad(format!("unsupported field type: {}", fields[3])));
    }
    if fields[4] != "general" {
        return Err(bad(format!("unsupported symmetry: {}", fields[4])));
    }

    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line.map_err(Error::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some(trimmed.to_string());
        break;
    }
    let size_line = size_line.ok_or_else(|| bad("missing size line"))?;
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(bad(format!("bad size line: {size_line:?}")));
    }
    let m: usize = dims[0].parse().map_err(|_| bad("bad row count"))?;
    let n: usize = dims[1].parse().map_err(|_| bad("bad column count"))?;
    let nnz: usize = dims[2].parse().map_err(|_| bad("bad entry count"))?;

    let mut triplets = Vec::with_capacity(nnz);
    for line in lines {
        let line = line.map_err(Error::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(bad(format!("bad entry line: {trimmed:?}")));
        }
        let i: usize = parts[0].parse().map_err(|_| bad("bad row index"))?;
        let j: usize = parts[1].parse().map_err(|_| bad("bad column index"))?;
        let v: f64 = parts[2].parse().map_err(|_| bad("bad value"))?;
        if i == 0 || j == 0 {
            return Err(bad("indices are 1-based; found 0"));
        }
        triplets.push((i - 1, j - 1, v));
    }
    if triplets.len() != nnz {
        return Err(bad(format!(
            "entry count mismatch: header says {nnz}, found {}",
            triplets.len()
        )));
    }
    SparseMatrixDual::from_triplets(&triplets, m, n)
}

/// Serializes a matrix in coordinate format (used by tests and tooling).
pub fn to_matrix_market(matrix: &SparseMatrixDual) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    out.push_str(&format!(
        "{} {} {}\n",
        matrix.rows(),
        matrix.cols(),
        matrix.nnz()
    ));
    for (i, j, v) in matrix.triplets() {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, v));
    }
    out
}
