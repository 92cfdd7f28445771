//! Datasets, images and reports.

mod image;
mod pgm;
mod report;
mod tabular;

pub use image::{flatten_columns, inscribe_rectangle, reshape_columns, RealImage};
pub use pgm::{read_pgm, read_pgm_path, write_pgm, GrayscaleImage, PgmEncoding};
pub use report::{
    ecdf_points, write_report, AggregateRow, Method, ReportFormat, ReportRow, SpecificationReport,
};
pub use tabular::{read_csv, read_csv_path, write_csv, CsvOptions, TabularDataset};

use thiserror::Error;

/// Errors from reading or writing datasets, images and reports.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("input contains no data")]
    Empty,

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at row {row}, column '{column}'")]
    NonFiniteValue { row: usize, column: String },

    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    #[error("truncated data: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },

    #[error("dimension mismatch: {width}x{height} needs {expected} values, found {found}")]
    DimensionMismatch {
        width: usize,
        height: usize,
        expected: usize,
        found: usize,
    },

    #[error("rectangle at ({x0}, {y0}) of size {w}x{h} does not fit in a {width}x{height} image")]
    OutOfBounds {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
