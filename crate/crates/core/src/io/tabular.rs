use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::FormatError;

/// Delimiter and header handling for CSV input and output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: true,
        }
    }
}

/// Named real-valued columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl TabularDataset {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self, FormatError> {
        if names.is_empty() || columns.is_empty() || columns[0].is_empty() {
            return Err(FormatError::Empty);
        }
        if names.len() != columns.len() {
            return Err(FormatError::RaggedRows {
                row: 0,
                expected: names.len(),
                found: columns.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(FormatError::DuplicateColumn(name.clone()));
            }
        }
        let rows = columns[0].len();
        for (name, column) in names.iter().zip(&columns) {
            if column.len() != rows {
                return Err(FormatError::RaggedRows {
                    row: column.len().min(rows) + 1,
                    expected: rows,
                    found: column.len(),
                });
            }
            if let Some(i) = column.iter().position(|v| !v.is_finite()) {
                return Err(FormatError::NonFiniteValue {
                    row: i + 1,
                    column: name.clone(),
                });
            }
        }
        Ok(TabularDataset { names, columns })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[k])
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.columns[0].len()
    }

    /// `(name, values)` pairs in column order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
    }

    /// Same names and shape, new values.
    pub fn with_columns(&self, columns: Vec<Vec<f64>>) -> Result<Self, FormatError> {
        TabularDataset::new(self.names.clone(), columns)
    }
}

/// Reads a numeric CSV table. Row numbers in errors count data rows from 1.
pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<TabularDataset, FormatError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut names: Option<Vec<String>> = if options.has_header {
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err(FormatError::Empty);
        }
        Some(header)
    } else {
        None
    };

    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let row = k + 1;
        let names = names
            .get_or_insert_with(|| (1..=record.len()).map(|c| format!("column_{c}")).collect());
        if columns.is_empty() {
            columns = vec![Vec::new(); names.len()];
        }
        if record.len() != names.len() {
            return Err(FormatError::RaggedRows {
                row,
                expected: names.len(),
                found: record.len(),
            });
        }
        for ((cell, column), name) in record.iter().zip(columns.iter_mut()).zip(names.iter()) {
            if cell.is_empty() {
                return Err(FormatError::Parse {
                    row,
                    column: name.clone(),
                    message: "missing value".to_string(),
                });
            }
            let value: f64 = cell.parse().map_err(|_| FormatError::Parse {
                row,
                column: name.clone(),
                message: format!("'{cell}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(FormatError::NonFiniteValue {
                    row,
                    column: name.clone(),
                });
            }
            column.push(value);
        }
    }

    match names {
        Some(names) if !columns.is_empty() => TabularDataset::new(names, columns),
        _ => Err(FormatError::Empty),
    }
}

pub fn read_csv_path(path: &Path, options: &CsvOptions) -> Result<TabularDataset, FormatError> {
    read_csv(File::open(path)?, options)
}

/// Writes a header row followed by the data. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(
    dataset: &TabularDataset,
    writer: W,
    options: &CsvOptions,
) -> Result<(), FormatError> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(options.delimiter)
        .from_writer(writer);
    if options.has_header {
        wtr.write_record(dataset.names())?;
    }
    let mut record = Vec::with_capacity(dataset.column_count());
    for i in 0..dataset.row_count() {
        record.clear();
        record.extend(dataset.columns().iter().map(|c| c[i].to_string()));
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}
