//! Labeled evaluation datasets: UTF-8 CSV with header `full_name,country,gender`.

use std::path::Path;

use thiserror::Error;

use crate::country::CountryCode;
use crate::types::{PersonRecord, TrueGender};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing column {column:?} in header")]
    MissingColumn { path: String, column: String },
    #[error("{path}: row {row} (line {line}): {message}")]
    Row {
        path: String,
        row: usize,
        line: u64,
        message: String,
    },
    #[error("{path}: dataset has no records")]
    Empty { path: String },
}

/// Loads a dataset. `country_column` names the column holding country codes;
/// empty cells mean "unknown country".
pub fn load_dataset(path: &Path, country_column: &str) -> Result<Vec<PersonRecord>, DatasetError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: display.clone(),
        source,
    })?;
    read_dataset(file, &display, country_column)
}

pub fn read_dataset(
    reader: impl std::io::Read,
    display: &str,
    country_column: &str,
) -> Result<Vec<PersonRecord>, DatasetError> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let row_err = |row: usize, line: u64, message: String| DatasetError::Row {
        path: display.to_string(),
        row,
        line,
        message,
    };
    let headers = csv
        .headers()
        .map_err(|e| row_err(0, 1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::MissingColumn {
                path: display.to_string(),
                column: name.to_string(),
            })
    };
    let name_idx = column("full_name")?;
    let gender_idx = column("gender")?;
    let country_idx = column(country_column)?;

    let mut records = Vec::new();
    for (i, result) in csv.records().enumerate() {
        let row = i + 1;
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            row_err(row, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let gender: TrueGender = field(gender_idx)
            .parse()
            .map_err(|_| row_err(row, line, format!("gender must be M or F, found {:?}", field(gender_idx))))?;
        let country = match field(country_idx) {
            "" => None,
            code => Some(
                code.parse::<CountryCode>()
                    .map_err(|e| row_err(row, line, e.to_string()))?,
            ),
        };
        let person = PersonRecord::new(field(name_idx), country, gender)
            .map_err(|e| row_err(row, line, e.to_string()))?;
        records.push(person);
    }
    if records.is_empty() {
        return Err(DatasetError::Empty {
            path: display.to_string(),
        });
    }
    Ok(records)
}
