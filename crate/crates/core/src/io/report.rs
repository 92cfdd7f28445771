use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::FormatError;
use crate::decomposition::decompose;
use crate::specification::PNorm;

/// Transformation method named in a report row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum Method {
    /// Least p-norm specification with per-group Fréchet p-means.
    Algorithm1,
    /// Closed-form quantile transformation plus inverse CDF.
    Algorithm2,
    /// Hyndman–Fan sample quantiles and interpolated CDF.
    EstimationBaseline,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::Algorithm1,
        Method::Algorithm2,
        Method::EstimationBaseline,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Algorithm1 => "algorithm1",
            Method::Algorithm2 => "algorithm2",
            Method::EstimationBaseline => "estimation_baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "algorithm1" => Ok(Method::Algorithm1),
            "algorithm2" => Ok(Method::Algorithm2),
            "estimation_baseline" | "baseline" => Ok(Method::EstimationBaseline),
            other => Err(format!(
                "unknown method '{other}' (expected algorithm1, algorithm2 or estimation_baseline)"
            )),
        }
    }
}

/// Error of one method on one column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub dataset: String,
    pub column: String,
    pub reference: String,
    pub p: PNorm,
    pub method: Method,
    pub error: f64,
    pub n: usize,
    pub m: usize,
    pub merged_unique_values: bool,
}

/// Errors of one method over all columns of a dataset: the sum of the
/// per-column errors and the ℓp norm of all column differences pooled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub dataset: String,
    pub reference: String,
    pub p: PNorm,
    pub method: Method,
    pub columns: usize,
    pub column_sum: f64,
    pub pooled: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SpecificationReport {
    /// Exact parameter set used to produce the rows.
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<AggregateRow>,
    pub warnings: Vec<String>,
    /// Whether algorithm 1 had the least error in every compared row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominance: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

/// Serializes a report. JSON objects have their keys in sorted order; CSV
/// has one row per column result followed by the `(sum)` and `(pooled)`
/// aggregate rows.
pub fn write_report(
    report: &SpecificationReport,
    format: ReportFormat,
) -> Result<Vec<u8>, FormatError> {
    match format {
        ReportFormat::Json => {
            // serde_json::Value keeps object keys in a BTreeMap.
            let value = serde_json::to_value(report)?;
            let mut out = serde_json::to_vec_pretty(&value)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record([
                "dataset",
                "column",
                "reference",
                "p",
                "method",
                "error",
                "n",
                "m",
                "merged_unique_values",
            ])?;
            for row in &report.rows {
                wtr.write_record([
                    row.dataset.clone(),
                    row.column.clone(),
                    row.reference.clone(),
                    row.p.to_string(),
                    row.method.to_string(),
                    row.error.to_string(),
                    row.n.to_string(),
                    row.m.to_string(),
                    row.merged_unique_values.to_string(),
                ])?;
            }
            for agg in &report.aggregates {
                for (label, value) in [("(sum)", agg.column_sum), ("(pooled)", agg.pooled)] {
                    wtr.write_record([
                        agg.dataset.clone(),
                        label.to_string(),
                        agg.reference.clone(),
                        agg.p.to_string(),
                        agg.method.to_string(),
                        value.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ])?;
                }
            }
            wtr.into_inner()
                .map_err(|e| FormatError::Io(e.into_error()))
        }
    }
}

/// Right-continuous ECDF steps: each unique value with the fraction of
/// samples less than or equal to it.
pub fn ecdf_points(values: &[f64]) -> crate::Result<Vec<(f64, f64)>> {
    let dec = decompose(values)?;
    let n = dec.len() as f64;
    Ok(dec
        .unique()
        .iter()
        .zip(&dec.offsets()[1..])
        .map(|(&v, &end)| (v, end as f64 / n))
        .collect())
}
