//! Sample quantile estimation baseline.
//!
//! The classical route to a quantile transformation: estimate `n` sample
//! quantiles with Hyndman–Fan interpolation, then map every input through
//! the piecewise-linear CDF those quantiles define.

use crate::error::{Error, Result};
use crate::quantile::{normal_inverse_cdf, uniform_reference, PlottingPositions, ReferenceSpec};

/// Estimated quantiles: `values[k]` is the sample quantile at `probs[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    probs: Vec<f64>,
    values: Vec<f64>,
}

impl QuantileTable {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Inverts the piecewise-linear interpolant at `value`.
    ///
    /// A run of equal table values maps to the midpoint of its probability
    /// range. Values outside the table clamp to the end probabilities.
    pub fn cdf(&self, value: f64) -> f64 {
        let values = &self.values;
        let probs = &self.probs;
        let lo = values.partition_point(|&v| v < value);
        let hi = values.partition_point(|&v| v <= value);
        if lo < hi {
            return probs[lo] + (probs[hi - 1] - probs[lo]) / 2.0;
        }
        if lo == 0 {
            return probs[0];
        }
        if lo == values.len() {
            return probs[values.len() - 1];
        }
        let (v0, v1) = (values[lo - 1], values[lo]);
        let (p0, p1) = (probs[lo - 1], probs[lo]);
        p0 + (p1 - p0) * (value - v0) / (v1 - v0)
    }
}

/// Hyndman–Fan sample quantile of sorted data at probability `q`.
///
/// `h = α + q(n + 1 − α − β)` is a 1-based fractional order-statistic
/// position, clamped to the sample range.
fn sample_quantile(sorted: &[f64], q: f64, positions: PlottingPositions) -> f64 {
    let n = sorted.len();
    let mut h = positions.alpha + q * (n as f64 + 1.0 - positions.alpha - positions.beta);
    // Plotting positions land on integer h up to rounding; snap so those
    // knots reproduce the order statistics exactly.
    if (h - h.round()).abs() <= 1e-9 * h.abs().max(1.0) {
        h = h.round();
    }
    let floor = h.floor();
    if floor < 1.0 {
        return sorted[0];
    }
    if floor >= n as f64 {
        return sorted[n - 1];
    }
    let j = floor as usize;
    let frac = h - floor;
    let (lower, upper) = (sorted[j - 1], sorted[j]);
    if frac == 0.0 {
        lower
    } else {
        lower + frac * (upper - lower)
    }
}

fn sorted_finite(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::UnorderableValue { index });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

fn check_probability(q: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&q) {
        Ok(q)
    } else {
        Err(Error::Domain {
            what: "probability",
            value: q,
        })
    }
}

/// Estimates the sample quantiles of `x` at strictly increasing `probs`.
pub fn estimate_quantiles(
    x: &[f64],
    probs: &[f64],
    positions: PlottingPositions,
) -> Result<QuantileTable> {
    let sorted = sorted_finite(x)?;
    positions.gamma(sorted.len())?;
    for &q in probs {
        check_probability(q)?;
    }
    if let Some(w) = probs.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain {
            what: "probability (not strictly increasing)",
            value: w[1],
        });
    }
    let values = probs
        .iter()
        .map(|&q| sample_quantile(&sorted, q, positions))
        .collect();
    Ok(QuantileTable {
        probs: probs.to_vec(),
        values,
    })
}

/// Transforms `x` by evaluating its estimated CDF, then retargets the
/// resulting probabilities through the inverse CDF of `reference`.
///
/// The table holds `n` quantiles at the plotting positions of `positions`.
pub fn baseline_transform(
    x: &[f64],
    reference: &ReferenceSpec,
    positions: PlottingPositions,
) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let probs = uniform_reference(n, positions)?;
    let table = estimate_quantiles(x, probs.values(), positions)?;
    let quantiles = x.iter().map(|&v| table.cdf(v));
    match reference {
        ReferenceSpec::UniformQuantiles(_) => Ok(quantiles.collect()),
        ReferenceSpec::Normal { mu, sigma } => quantiles
            .map(|q| normal_inverse_cdf(q, *mu, *sigma))
            .collect(),
        ReferenceSpec::Empirical(data) => {
            let sorted = sorted_finite(data)?;
            quantiles
                .map(|q| Ok(sample_quantile(&sorted, check_probability(q)?, positions)))
                .collect()
        }
    }
}
