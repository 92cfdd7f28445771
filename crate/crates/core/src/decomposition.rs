//! Sorted-unique factorization of an input array.
//!
//! For an input `x` of length `n` with `m` distinct values, a [`Decomposition`]
//! holds the stable sort order `order`, the sorted unique values, their
//! counts, and the `m + 1` group offsets. The sorted input is the
//! concatenation of `counts[j]` copies of `unique[j]`, and group `j` occupies
//! sorted positions `offsets[j]..offsets[j + 1]`.
//!
//! The `n x m` indicator matrix mapping unique values to sorted positions is
//! never built; expanding a vector of `m` group values through the offsets
//! is all that is needed.

use std::cmp::Ordering;
use std::ops::Range;

use crate::error::{Error, Result};

/// Stable sort order, unique values, counts and group offsets of an input.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    order: Vec<usize>,
    unique: Vec<T>,
    counts: Vec<usize>,
    offsets: Vec<usize>,
}

/// Returns the indices that stably sort `x`.
///
/// Equal elements keep their relative order, so the result is deterministic.
/// Elements that are not comparable with themselves (NaN) are rejected.
pub fn argsort_stable<T: PartialOrd>(x: &[T]) -> Result<Vec<usize>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = x.iter().position(|v| v.partial_cmp(v).is_none()) {
        return Err(Error::UnorderableValue { index });
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut unordered = None;
    // slice::sort_by is a stable merge sort.
    order.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b]).unwrap_or_else(|| {
            unordered.get_or_insert(a.max(b));
            Ordering::Equal
        })
    });
    match unordered {
        Some(index) => Err(Error::UnorderableValue { index }),
        None => Ok(order),
    }
}

/// Factors `x` into its stable sort order, sorted unique values and counts.
pub fn decompose<T: PartialOrd + Clone>(x: &[T]) -> Result<Decomposition<T>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = x.iter().position(|v| v.partial_cmp(v).is_none()) {
        return Err(Error::UnorderableValue { index });
    }
    // Sorting values next to their indices keeps comparisons cache local,
    // which matters once the input outgrows the cache.
    // An incomparable pair is caught by the scan below.
    let mut pairs: Vec<(T, usize)> = x.iter().cloned().zip(0..).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    let mut order = Vec::with_capacity(x.len());
    let mut unique: Vec<T> = Vec::new();
    let mut offsets = vec![0];
    for (pos, (value, i)) in pairs.into_iter().enumerate() {
        order.push(i);
        match unique.last() {
            Some(last) if last.partial_cmp(&value) == Some(Ordering::Equal) => {}
            Some(last) if last.partial_cmp(&value) != Some(Ordering::Less) => {
                // Only reachable for a PartialOrd that is not a total order
                // on the input.
                return Err(Error::UnorderableValue { index: i });
            }
            _ => {
                if pos > 0 {
                    offsets.push(pos);
                }
                unique.push(value);
            }
        }
    }
    offsets.push(x.len());
    let counts = offsets.windows(2).map(|w| w[1] - w[0]).collect();

    Ok(Decomposition {
        order,
        unique,
        counts,
        offsets,
    })
}

impl<T> Decomposition<T> {
    /// Number of input elements.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    /// Always false: a decomposition is only built from nonempty input.
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Number of distinct input values.
    pub fn group_count(&self) -> usize {
        self.unique.len()
    }

    /// Indices that stably sort the input.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sorted unique input values, strictly increasing.
    pub fn unique(&self) -> &[T] {
        &self.unique
    }

    /// Multiplicity of each unique value.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Group start offsets into the sorted input, with a final entry equal to `len()`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Sorted positions covered by group `j`.
    pub fn group_range(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// Sorted-position ranges of all groups, in increasing value order.
    pub fn groups(&self) -> impl ExactSizeIterator<Item = Range<usize>> + '_ {
        self.offsets.windows(2).map(|w| w[0]..w[1])
    }

    /// True when every input value is distinct, i.e. ordered assignment alone is bijective.
    pub fn all_distinct(&self) -> bool {
        self.unique.len() == self.order.len()
    }

    /// Builds the output array by ordered assignment: every element of group
    /// `j` receives `values[j]`.
    pub fn reconstruct<U: Clone>(&self, values: &[U]) -> Result<Vec<U>> {
        if values.len() != self.group_count() {
            return Err(Error::LengthMismatch {
                expected: self.group_count(),
                found: values.len(),
            });
        }
        let mut out: Vec<Option<U>> = vec![None; self.len()];
        for (range, value) in self.groups().zip(values) {
            for &i in &self.order[range] {
                out[i] = Some(value.clone());
            }
        }
        Ok(out
            .into_iter()
            .map(|v| v.expect("order is a permutation"))
            .collect())
    }

    /// Expands group values into sorted order (the product of the group
    /// indicator matrix with `values`).
    pub fn expand_sorted<U: Clone>(&self, values: &[U]) -> Result<Vec<U>> {
        if values.len() != self.group_count() {
            return Err(Error::LengthMismatch {
                expected: self.group_count(),
                found: values.len(),
            });
        }
        let mut out = Vec::with_capacity(self.len());
        for (&count, value) in self.counts.iter().zip(values) {
            out.extend(std::iter::repeat_n(value.clone(), count));
        }
        Ok(out)
    }

    /// [`reconstruct`](Self::reconstruct) specialized to real outputs.
    pub fn reconstruct_real(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.group_count() {
            return Err(Error::LengthMismatch {
                expected: self.group_count(),
                found: values.len(),
            });
        }
        let mut out = vec![0.0; self.len()];
        for (range, &value) in self.groups().zip(values) {
            for &i in &self.order[range] {
                out[i] = value;
            }
        }
        Ok(out)
    }
}
