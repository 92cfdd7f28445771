//! Column-wise method comparison and exact histogram specification of images.

use crate::baseline::baseline_transform;
use crate::decomposition::decompose;
use crate::error::{Error, Result};
use crate::io::{
    flatten_columns, reshape_columns, AggregateRow, GrayscaleImage, Method, RealImage, ReportRow,
    SpecificationReport, TabularDataset,
};
use crate::quantile::{transform_to_reference_with_positions, PlottingPositions, ReferenceSpec};
use crate::specification::{
    sorted_error, specification_error, specify_detailed, PNorm, SortedReference,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub references: Vec<ReferenceSpec>,
    pub norms: Vec<PNorm>,
    pub methods: Vec<Method>,
    /// Plotting positions for uniform references, normal scores and the
    /// quantile transform.
    pub positions: PlottingPositions,
    /// Plotting positions of the baseline's quantile table.
    pub baseline_positions: PlottingPositions,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            references: vec![
                ReferenceSpec::UniformQuantiles(PlottingPositions::TYPE_6),
                ReferenceSpec::standard_normal(),
            ],
            norms: vec![PNorm::P1, PNorm::P2, PNorm::PInf],
            methods: Method::ALL.to_vec(),
            positions: PlottingPositions::TYPE_6,
            baseline_positions: PlottingPositions::TYPE_6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutput {
    pub values: Vec<f64>,
    /// Distinct inputs collapsed onto one output value.
    pub merged_unique_values: bool,
}

fn counts_changed(x: &[f64], y: &[f64]) -> Result<bool> {
    Ok(decompose(x)?.counts() != decompose(y)?.counts())
}

/// Runs one method on one column.
pub fn apply_method(
    method: Method,
    column: &[f64],
    reference: &ReferenceSpec,
    p: PNorm,
    config: &CompareConfig,
) -> Result<MethodOutput> {
    match method {
        Method::Algorithm1 => {
            let sorted = reference.sorted(column.len(), config.positions)?;
            let s = specify_detailed(column, &sorted, p)?;
            let merged = s.has_merged_values();
            Ok(MethodOutput {
                values: s.values,
                merged_unique_values: merged,
            })
        }
        Method::Algorithm2 => {
            let values =
                transform_to_reference_with_positions(column, reference, p, config.positions)?;
            let merged = counts_changed(column, &values)?;
            Ok(MethodOutput {
                values,
                merged_unique_values: merged,
            })
        }
        Method::EstimationBaseline => {
            let values = baseline_transform(column, reference, config.baseline_positions)?;
            let merged = counts_changed(column, &values)?;
            Ok(MethodOutput {
                values,
                merged_unique_values: merged,
            })
        }
    }
}

/// Slack allowed when checking that algorithm 1 is never beaten.
const DOMINANCE_SLACK: f64 = 1e-12;

fn dominates(optimal: f64, other: f64) -> bool {
    optimal <= other + DOMINANCE_SLACK * (1.0 + other.abs())
}

/// Errors of every configured method, reference and norm on every column.
///
/// Rows are ordered by reference, norm, method and then input column order.
pub fn compare_dataset(
    name: &str,
    dataset: &TabularDataset,
    config: &CompareConfig,
) -> Result<SpecificationReport> {
    let mut report = SpecificationReport::default();
    let params = &mut report.parameters;
    params.insert("alpha".into(), config.positions.alpha.to_string());
    params.insert("beta".into(), config.positions.beta.to_string());
    params.insert(
        "baseline_alpha".into(),
        config.baseline_positions.alpha.to_string(),
    );
    params.insert(
        "baseline_beta".into(),
        config.baseline_positions.beta.to_string(),
    );
    params.insert(
        "references".into(),
        join(config.references.iter().map(|r| r.label())),
    );
    params.insert("p".into(), join(config.norms.iter().map(|p| p.to_string())));
    params.insert(
        "methods".into(),
        join(config.methods.iter().map(|m| m.to_string())),
    );

    let n = dataset.row_count();
    let group_counts = dataset
        .columns()
        .iter()
        .map(|c| decompose(c).map(|d| d.group_count()))
        .collect::<Result<Vec<_>>>()?;
    let mut dominance = true;
    for reference in &config.references {
        let sorted = reference.sorted(n, config.positions)?;
        let label = reference.label();
        for &p in &config.norms {
            // Best algorithm 1 error per column, for the dominance check.
            let mut optimal: Vec<Option<f64>> = vec![None; dataset.column_count()];
            let mut others: Vec<Vec<f64>> = vec![Vec::new(); dataset.column_count()];
            for &method in &config.methods {
                let mut pooled = Vec::with_capacity(n * dataset.column_count());
                let mut column_sum = 0.0;
                for (k, (column_name, column)) in dataset.iter().enumerate() {
                    let out = apply_method(method, column, reference, p, config)?;
                    let mut y = out.values;
                    y.sort_by(f64::total_cmp);
                    let error = sorted_error(&y, sorted.values(), p);
                    pooled.extend(y.iter().zip(sorted.values()).map(|(a, b)| a - b));
                    column_sum += error;
                    if method == Method::Algorithm1 {
                        optimal[k] = Some(error);
                        if out.merged_unique_values {
                            report.warnings.push(format!(
                                "{name}/{column_name}: merged unique values against {label} at p = {p}"
                            ));
                        }
                    } else {
                        others[k].push(error);
                    }
                    report.rows.push(ReportRow {
                        dataset: name.to_string(),
                        column: column_name.to_string(),
                        reference: label.clone(),
                        p,
                        method,
                        error,
                        n,
                        m: group_counts[k],
                        merged_unique_values: out.merged_unique_values,
                    });
                }
                report.aggregates.push(AggregateRow {
                    dataset: name.to_string(),
                    reference: label.clone(),
                    p,
                    method,
                    columns: dataset.column_count(),
                    column_sum,
                    pooled: p.norm(pooled),
                });
            }
            for (best, rest) in optimal.iter().zip(&others) {
                if let Some(best) = best {
                    dominance &= rest.iter().all(|&e| dominates(*best, e));
                }
            }
        }
    }
    if config.methods.contains(&Method::Algorithm1) && config.methods.len() > 1 {
        report.dominance = Some(dominance);
    }
    Ok(report)
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(",")
}

/// Result of exact histogram specification of one image against another.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSpecification {
    pub output: RealImage,
    pub reference: SortedReference,
    pub p: PNorm,
    pub error: f64,
    pub merged_unique_values: bool,
}

impl ImageSpecification {
    /// Error after rounding the output to 8-bit intensities.
    pub fn quantized_error(&self) -> Result<f64> {
        specification_error(
            &flatten_columns(&self.output.quantize()),
            &self.reference,
            self.p,
        )
    }
}

/// Specifies the intensity histogram of `input` against the pixels of
/// `reference`. Both images are flattened column by column; equal input
/// intensities always receive equal output values.
pub fn specify_image(
    input: &GrayscaleImage,
    reference: &GrayscaleImage,
    p: PNorm,
) -> Result<ImageSpecification> {
    if input.len() != reference.len() {
        return Err(Error::PixelCountMismatch {
            input: input.len(),
            reference: reference.len(),
        });
    }
    let x = flatten_columns(input);
    let sorted = SortedReference::from_unsorted(flatten_columns(reference))?;
    let s = specify_detailed(&x, &sorted, p)?;
    let error = specification_error(&s.values, &sorted, p)?;
    let output = reshape_columns(&s.values, input.width(), input.height())
        .expect("output has the input's pixel count");
    Ok(ImageSpecification {
        merged_unique_values: s.has_merged_values(),
        output,
        reference: sorted,
        p,
        error,
    })
}
