//! CSV ingestion: square matrices, rectangular matrices, point clouds.

use std::path::Path;

use barbridge_core::complex::{CrossDissimilarityMatrix, DissimilarityMatrix};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Reads a numeric table. A first row that fails to parse entirely as
/// numbers is treated as a header and skipped.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let fields: Vec<&str> = record.iter().filter(|f| !f.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(e) if i == 0 && rows.is_empty() => {
                let _ = e; // header row
            }
            Err(e) => {
                return Err(CliError::input(format!(
                    "{}: row {}: {e}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no numeric rows", path.display())));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(CliError::input(format!("{}: ragged rows", path.display())));
    }
    Ok(rows)
}

pub fn square_matrix(rows: &[Vec<f64>]) -> Result<DissimilarityMatrix, CliError> {
    let n = rows.len();
    if rows[0].len() != n {
        return Err(CliError::input(format!(
            "expected a square matrix, got {n}x{}",
            rows[0].len()
        )));
    }
    DissimilarityMatrix::new(n, rows.iter().flatten().copied().collect())
        .map_err(CliError::from_core)
}

pub fn rect_matrix(rows: &[Vec<f64>]) -> Result<CrossDissimilarityMatrix, CliError> {
    CrossDissimilarityMatrix::new(
        rows.len(),
        rows[0].len(),
        rows.iter().flatten().copied().collect(),
    )
    .map_err(CliError::from_core)
}

pub fn euclidean(points: &[Vec<f64>]) -> Result<DissimilarityMatrix, CliError> {
    let n = points.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist(&points[i], &points[j]);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DissimilarityMatrix::new(n, data).map_err(CliError::from_core)
}

pub fn euclidean_cross(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<CrossDissimilarityMatrix, CliError> {
    let mut data = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            data.push(dist(p, q));
        }
    }
    CrossDissimilarityMatrix::new(a.len(), b.len(), data).map_err(CliError::from_core)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn file_digest(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(hex_digest(&bytes))
}

pub fn table_digest(rows: &[Vec<f64>]) -> String {
    let mut h = Sha256::new();
    for row in rows {
        for v in row {
            h.update(v.to_bits().to_le_bytes());
        }
        h.update(b"\n");
    }
    format!("{:x}", h.finalize())
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}
