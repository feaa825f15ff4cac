//! CSV ingestion: header row required, UTF-8, `.` decimal separator.
//! A missing or non-numeric value in the selected column fails with the
//! 1-based file line number; rows are never silently dropped.

use std::path::Path;

use crate::CliError;

/// Read one numeric column. `line` in errors counts the header as line 1.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Parse { line: 1, message: e.to_string() })?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| CliError::Usage(format!(
            "column '{column}' not found in {} (available: {})",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(", ")
        )))?;

    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| CliError::Parse { line, message: e.to_string() })?;
        let field = record
            .get(idx)
            .ok_or_else(|| CliError::Parse {
                line,
                message: format!("row is missing column '{column}'"),
            })?;
        if field.is_empty() {
            return Err(CliError::Parse {
                line,
                message: format!("empty value in column '{column}'"),
            });
        }
        let value: f64 = field.parse().map_err(|_| CliError::Parse {
            line,
            message: format!("'{field}' in column '{column}' is not numeric"),
        })?;
        if !value.is_finite() {
            return Err(CliError::Parse {
                line,
                message: format!("non-finite value in column '{column}'"),
            });
        }
        values.push(value);
    }
    Ok(values)
}

/// Column names of a CSV file.
pub fn header_names(path: &Path) -> Result<Vec<String>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(reader
        .headers()
        .map_err(|e| CliError::Parse { line: 1, message: e.to_string() })?
        .iter()
        .map(|s| s.trim().to_string())
        .collect())
}
