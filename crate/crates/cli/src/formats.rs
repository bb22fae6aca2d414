//! Input files.
//!
//! Value files (gains, losses, probabilities) are either one float per line
//! or a CSV whose header is `index,<column>`; in the CSV form the index column
//! is carried through to outputs. Validation files are CSV with header
//! `predicted,true`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{CliError, Result};

/// A column of values with the caller's point ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFile {
    /// Ids from the `index` column, if the file had one.
    pub indices: Option<Vec<u64>>,
    /// The values, in file order.
    pub values: Vec<f64>,
}

impl ValueFile {
    /// Point ids: the `index` column, or positions.
    pub fn ids(&self) -> Vec<u64> {
        match &self.indices {
            Some(ix) => ix.clone(),
            None => (0..self.values.len() as u64).collect(),
        }
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Reads a value file; `column` is the expected name of the value column in
/// the CSV form (e.g. `gain`).
pub fn read_values(path: &Path, column: &str) -> Result<ValueFile> {
    parse_values(&read_to_string(path)?, path, column)
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn parse_values(text: &str, path: &Path, column: &str) -> Result<ValueFile> {
    let first = text.lines().find(|l| !l.trim().is_empty());
    let Some(first) = first else {
        return Err(parse_err(path, 1, "no values"));
    };
    if !first.contains(',') {
        let mut values = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| parse_err(path, k + 1, format!("not a number: {line:?}")))?;
            values.push(v);
        }
        return Ok(ValueFile { indices: None, values });
    }

    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.len() != 2 || &header[0] != "index" || &header[1] != column {
        return Err(parse_err(path, 1, format!("expected header \"index,{column}\"")));
    }
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let id: u64 = record[0]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad index {:?}", &record[0])))?;
        let v: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(path, line, format!("not a number: {:?}", &record[1])))?;
        indices.push(id);
        values.push(v);
    }
    if values.is_empty() {
        return Err(parse_err(path, 2, "no values"));
    }
    Ok(ValueFile {
        indices: Some(indices),
        values,
    })
}

/// Reads `(predicted, true)` label pairs.
pub fn read_validation(path: &Path) -> Result<Vec<(String, String)>> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.len() != 2 || &header[0] != "predicted" || &header[1] != "true" {
        return Err(parse_err(path, 1, "expected header \"predicted,true\""));
    }
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record?;
        pairs.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(pairs)
}

/// Reads and deserializes a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        if e.is_data() {
            CliError::Config(format!("{}: {e}", path.display()))
        } else {
            parse_err(path, e.line(), e.to_string())
        }
    })
}
