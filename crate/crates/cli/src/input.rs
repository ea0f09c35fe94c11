use std::path::Path;

use nalgebra::{DMatrix, DVector};
use regshrink::Dataset;

use crate::error::{CliError, Result};

/// Reads a numeric CSV with a header row. The response column is chosen by
/// name, or the last column when `response` is `None`; every other column is
/// a predictor.
pub fn read_dataset(path: &Path, response: Option<&str>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < 2 {
        return Err(CliError::input(
            path,
            "need a response and at least one predictor column",
        ));
    }
    let target = match response {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Usage(format!("no column named {name:?} in {}", path.display())))?,
        None => headers.len() - 1,
    };

    let mut x = Vec::new();
    let mut y = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, e))?;
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::input(
                    path,
                    format!(
                        "line {}: {:?} in column {:?} is not a number",
                        row + 2,
                        field,
                        headers[col]
                    ),
                )
            })?;
            if !v.is_finite() {
                return Err(CliError::input(
                    path,
                    format!("line {}: non-finite value in column {:?}", row + 2, headers[col]),
                ));
            }
            if col == target {
                y.push(v);
            } else {
                x.push(v);
            }
        }
    }
    let n = y.len();
    if n == 0 {
        return Err(CliError::input(path, "no data rows"));
    }
    let p = headers.len() - 1;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != target)
        .map(|(_, h)| h.clone())
        .collect();
    let predictors = DMatrix::from_row_slice(n, p, &x);
    Ok(Dataset::new(predictors, DVector::from_vec(y), names)?)
}
