//! Histogram specification by assignment of optimal unique values.
//!
//! Given an input `x` and a sorted reference `v` of the same length, each
//! group of equal inputs covers a contiguous slice of `v` in sorted order.
//! The least p-norm output for the group is the Fréchet p-mean of that slice,
//! and groups are independent of each other.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::decomposition::{decompose, Decomposition};
use crate::error::{Error, Result};

/// Which ℓp objective to minimize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    /// ℓ1: the group value is the median of its reference slice.
    P1,
    /// ℓ2: the arithmetic mean.
    P2,
    /// ℓ∞: the midpoint of the slice extremes.
    PInf,
    /// Any finite `p >= 1`, solved numerically.
    General(f64),
}

impl PNorm {
    /// Numerically solved norm with exponent `p`.
    pub fn general(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(PNorm::General(p))
        } else {
            Err(Error::InvalidP(p))
        }
    }

    /// Picks the closed form for `p` in {1, 2, ∞} and the solver otherwise.
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(PNorm::P1)
        } else if p == 2.0 {
            Ok(PNorm::P2)
        } else if p == f64::INFINITY {
            Ok(PNorm::PInf)
        } else {
            Self::general(p)
        }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            PNorm::P1 => 1.0,
            PNorm::P2 => 2.0,
            PNorm::PInf => f64::INFINITY,
            PNorm::General(p) => p,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PNorm::General(p) if !(p.is_finite() && p >= 1.0) => Err(Error::InvalidP(p)),
            _ => Ok(()),
        }
    }

    /// ℓp norm of a sequence of differences.
    pub fn norm<I: IntoIterator<Item = f64>>(&self, diffs: I) -> f64 {
        let abs = diffs.into_iter().map(f64::abs);
        match *self {
            PNorm::P1 => abs.sum(),
            PNorm::P2 => abs.map(|d| d * d).sum::<f64>().sqrt(),
            PNorm::PInf => abs.fold(0.0, f64::max),
            PNorm::General(p) => {
                let diffs: Vec<f64> = abs.collect();
                let scale = diffs.iter().copied().fold(0.0, f64::max);
                if scale == 0.0 {
                    return 0.0;
                }
                scale
                    * diffs
                        .iter()
                        .map(|d| (d / scale).powf(p))
                        .sum::<f64>()
                        .powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PNorm::P1 => f.write_str("1"),
            PNorm::P2 => f.write_str("2"),
            PNorm::PInf => f.write_str("inf"),
            PNorm::General(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(PNorm::P1),
            "2" => Ok(PNorm::P2),
            "inf" | "infinity" | "∞" => Ok(PNorm::PInf),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::InvalidP(f64::NAN))?;
                PNorm::from_exponent(p)
            }
        }
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A finite, nondecreasing reference array.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedReference(Vec<f64>);

impl SortedReference {
    /// Wraps already sorted values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteReference { index });
        }
        if let Some(k) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::UnsortedReference { index: k + 1 });
        }
        Ok(SortedReference(values))
    }

    /// Sorts arbitrary finite values into a reference.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteReference { index });
        }
        values.sort_by(f64::total_cmp);
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for SortedReference {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

const GOLDEN_TOLERANCE: f64 = 1e-10;
const GOLDEN_MAX_ITER: usize = 200;
const POLISH_MARGIN: f64 = 1e-6;
const POLISH_MAX_ITER: usize = 80;

/// Fréchet p-mean of a sorted slice: the scalar minimizing `‖u - slice‖_p`.
///
/// For an even-length slice under ℓ1 every point between the two central
/// order statistics is optimal; their midpoint is returned.
pub fn frechet_p_mean(slice: &[f64], p: PNorm) -> Result<f64> {
    p.validate()?;
    let (first, last) = match (slice.first(), slice.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::EmptySlice),
    };
    let len = slice.len();
    Ok(match p {
        PNorm::P1 => {
            if len % 2 == 1 {
                slice[len / 2]
            } else {
                midpoint(slice[len / 2 - 1], slice[len / 2])
            }
        }
        PNorm::P2 => {
            let mean = slice.iter().sum::<f64>() / len as f64;
            mean.clamp(first, last)
        }
        PNorm::PInf => midpoint(first, last),
        PNorm::General(exp) => golden_section_p_mean(slice, exp),
    })
}

fn midpoint(a: f64, b: f64) -> f64 {
    a + (b - a) / 2.0
}

/// Minimizes the convex objective `Σ |u - s_k|^p` over `[first, last]`.
///
/// The slice is mapped onto `[0, 1]` so the powers stay bounded for large `p`.
fn golden_section_p_mean(slice: &[f64], p: f64) -> f64 {
    let lo = slice[0];
    let hi = slice[slice.len() - 1];
    let range = hi - lo;
    if range <= 0.0 {
        return lo;
    }
    let scaled: Vec<f64> = slice.iter().map(|s| (s - lo) / range).collect();
    let objective = |t: f64| scaled.iter().map(|s| (t - s).abs().powf(p)).sum::<f64>();

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    for _ in 0..GOLDEN_MAX_ITER {
        if b - a <= GOLDEN_TOLERANCE {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let t = if fc <= fd { c } else { d };
    let t = polish(&scaled, p, t);
    (lo + t * range).clamp(lo, hi)
}

/// Refines a golden-section estimate by bisection on the derivative of the
/// objective, which is monotone. Function values are flat near the minimum,
/// so comparing them stalls at roughly the square root of machine epsilon;
/// the sign of the derivative stays informative down to rounding.
fn polish(scaled: &[f64], p: f64, t: f64) -> f64 {
    let slope = |t: f64| {
        scaled
            .iter()
            .map(|&s| {
                let d = t - s;
                d.signum() * d.abs().powf(p - 1.0)
            })
            .sum::<f64>()
    };
    let (mut a, mut b) = ((t - POLISH_MARGIN).max(0.0), (t + POLISH_MARGIN).min(1.0));
    if slope(a) > 0.0 || slope(b) < 0.0 {
        a = 0.0;
        b = 1.0;
    }
    for _ in 0..POLISH_MAX_ITER {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if slope(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Output of [`specify_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct Specified {
    /// Output values in input order.
    pub values: Vec<f64>,
    /// Optimal value of each input group, in increasing input order.
    pub unique_values: Vec<f64>,
    /// Size of each input group.
    pub counts: Vec<usize>,
}

impl Specified {
    /// True when adjacent groups received the same value, so distinct
    /// inputs collapsed and the output counts differ from the input counts.
    pub fn has_merged_values(&self) -> bool {
        self.unique_values.windows(2).any(|w| w[0] >= w[1])
    }
}

/// Optimal group values for a decomposition against a sorted reference.
pub fn optimal_unique_values<T>(
    dec: &Decomposition<T>,
    reference: &SortedReference,
    p: PNorm,
) -> Result<Vec<f64>> {
    if dec.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: dec.len(),
            found: reference.len(),
        });
    }
    let v = reference.values();
    dec.groups()
        .map(|range| frechet_p_mean(&v[range], p))
        .collect()
}

/// Least p-norm histogram specification of `x` against `reference`.
pub fn specify_detailed<T: PartialOrd + Clone>(
    x: &[T],
    reference: &SortedReference,
    p: PNorm,
) -> Result<Specified> {
    p.validate()?;
    if x.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: reference.len(),
        });
    }
    let dec = decompose(x)?;
    let unique_values = optimal_unique_values(&dec, reference, p)?;
    let values = dec.reconstruct_real(&unique_values)?;
    Ok(Specified {
        values,
        unique_values,
        counts: dec.counts().to_vec(),
    })
}

/// Least p-norm histogram specification of `x` against `reference`.
///
/// Equal inputs map to equal outputs and the output preserves the weak
/// order of the input.
pub fn specify<T: PartialOrd + Clone>(
    x: &[T],
    reference: &SortedReference,
    p: PNorm,
) -> Result<Vec<f64>> {
    specify_detailed(x, reference, p).map(|s| s.values)
}

/// ℓp distance between the sorted output and the sorted reference.
///
/// This is the p-Wasserstein distance between the two empirical measures
/// (without the 1/n weighting).
pub fn specification_error(y: &[f64], reference: &SortedReference, p: PNorm) -> Result<f64> {
    p.validate()?;
    if y.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            found: y.len(),
        });
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted_error(&sorted, reference.values(), p))
}

pub(crate) fn sorted_error(sorted: &[f64], reference: &[f64], p: PNorm) -> f64 {
    p.norm(sorted.iter().zip(reference).map(|(a, b)| a - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference(v: &[f64]) -> SortedReference {
        SortedReference::new(v.to_vec()).unwrap()
    }

    /// Dense grid search of `‖u - slice‖_p` followed by local grid refinement.
    fn grid_p_mean(slice: &[f64], p: f64) -> (f64, f64) {
        let objective = |u: f64| -> f64 { slice.iter().map(|s| (u - s).abs().powf(p)).sum() };
        let (mut lo, mut hi) = (slice[0], slice[slice.len() - 1]);
        let mut best = lo;
        for _ in 0..4 {
            let steps = 2000;
            let h = (hi - lo) / steps as f64;
            best = (0..=steps)
                .map(|k| lo + h * k as f64)
                .min_by(|a, b| objective(*a).total_cmp(&objective(*b)))
                .unwrap();
            lo = best - h;
            hi = best + h;
        }
        (best, objective(best))
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(frechet_p_mean(&[1.0, 2.0, 10.0], PNorm::P1).unwrap(), 2.0);
        assert_eq!(frechet_p_mean(&[1.0, 2.0, 9.0], PNorm::P2).unwrap(), 4.0);
        assert_eq!(frechet_p_mean(&[1.0, 2.0, 9.0], PNorm::PInf).unwrap(), 5.0);
        let u = frechet_p_mean(&[0.0, 1.0], PNorm::General(3.0)).unwrap();
        assert!((u - 0.5).abs() < 1e-9, "{u}");
    }

    #[test]
    fn general_p_matches_grid_oracle() {
        let slice = [0.0, 0.0, 1.0];
        let (oracle, _) = grid_p_mean(&slice, 1.5);
        let u = frechet_p_mean(&slice, PNorm::General(1.5)).unwrap();
        assert!((u - oracle).abs() < 1e-8, "{u} vs {oracle}");
        // Stationarity 2·u^0.5 = (1 - u)^0.5 gives u = 1/5.
        assert!((u - 0.2).abs() < 1e-9, "{u}");
    }

    #[test]
    fn l1_even_length_takes_midpoint_of_flat_minimum() {
        let slice = [1.0, 3.0, 5.0, 9.0];
        let objective = |u: f64| -> f64 { slice.iter().map(|s| (u - s).abs()).sum() };
        let (_, min) = grid_p_mean(&slice, 1.0);
        assert!((objective(3.0) - min).abs() < 1e-9);
        assert!((objective(5.0) - min).abs() < 1e-9);
        assert_eq!(frechet_p_mean(&slice, PNorm::P1).unwrap(), 4.0);
    }

    #[test]
    fn p_mean_errors() {
        assert_eq!(frechet_p_mean(&[], PNorm::P1), Err(Error::EmptySlice));
        assert_eq!(
            frechet_p_mean(&[1.0], PNorm::General(0.5)),
            Err(Error::InvalidP(0.5))
        );
        assert_eq!(PNorm::general(0.999), Err(Error::InvalidP(0.999)));
        assert!(PNorm::general(f64::NAN).is_err());
    }

    #[test]
    fn parse_p() {
        assert_eq!("1".parse::<PNorm>().unwrap(), PNorm::P1);
        assert_eq!("2".parse::<PNorm>().unwrap(), PNorm::P2);
        assert_eq!("inf".parse::<PNorm>().unwrap(), PNorm::PInf);
        assert_eq!("1.5".parse::<PNorm>().unwrap(), PNorm::General(1.5));
        assert_eq!("1.0".parse::<PNorm>().unwrap(), PNorm::P1);
        assert_eq!("0.5".parse::<PNorm>(), Err(Error::InvalidP(0.5)));
        assert!("abc".parse::<PNorm>().is_err());
        assert_eq!(PNorm::PInf.to_string(), "inf");
        assert_eq!(PNorm::General(1.5).to_string(), "1.5");
    }

    #[test]
    fn reference_validation() {
        assert_eq!(
            SortedReference::new(vec![0.0, 2.0, 1.0]),
            Err(Error::UnsortedReference { index: 2 })
        );
        assert_eq!(
            SortedReference::new(vec![0.0, f64::INFINITY]),
            Err(Error::NonFiniteReference { index: 1 })
        );
        assert_eq!(SortedReference::new(vec![]), Err(Error::EmptyInput));
        let r = SortedReference::from_unsorted(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(r.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn specify_examples() {
        let v = reference(&[0.0, 1.0, 4.0]);
        assert_eq!(
            specify(&[5, 5, 2], &v, PNorm::P2).unwrap(),
            vec![2.5, 2.5, 0.0]
        );
        assert_eq!(
            specify(&[5, 5, 2], &v, PNorm::P1).unwrap(),
            vec![2.5, 2.5, 0.0]
        );

        let y = specify(&[9.0, -1.0, 4.0], &v, PNorm::General(1.7)).unwrap();
        assert_eq!(y, vec![4.0, 0.0, 1.0]);
    }

    #[test]
    fn l1_example_error_is_grid_minimum() {
        // Group {1, 4} under ℓ1: every u in [1, 4] costs 3.
        let v = reference(&[0.0, 1.0, 4.0]);
        let y = specify(&[5, 5, 2], &v, PNorm::P1).unwrap();
        let err = specification_error(&y, &v, PNorm::P1).unwrap();
        let (_, min) = grid_p_mean(&[1.0, 4.0], 1.0);
        assert!((err - 3.0).abs() < 1e-12);
        assert!((err - min).abs() < 1e-9);
    }

    #[test]
    fn error_examples() {
        let v = reference(&[0.0, 1.0, 4.0]);
        assert_eq!(
            specification_error(&[4.0, 0.0, 1.0], &v, PNorm::P2).unwrap(),
            0.0
        );
        assert_eq!(
            specification_error(&[2.5, 2.5, 0.0], &v, PNorm::P1).unwrap(),
            3.0
        );
        assert_eq!(
            specification_error(&[2.5, 2.5, 0.0], &v, PNorm::PInf).unwrap(),
            1.5
        );
        let l2 = specification_error(&[2.5, 2.5, 0.0], &v, PNorm::P2).unwrap();
        assert!((l2 - 4.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            specification_error(&[1.0], &v, PNorm::P1),
            Err(Error::LengthMismatch {
                expected: 3,
                found: 1
            })
        );
    }

    #[test]
    fn specify_errors() {
        let v = reference(&[0.0, 1.0]);
        assert_eq!(
            specify(&[1.0], &v, PNorm::P1),
            Err(Error::LengthMismatch {
                expected: 1,
                found: 2
            })
        );
        assert_eq!(
            specify(&[1.0, f64::NAN], &v, PNorm::P1),
            Err(Error::UnorderableValue { index: 1 })
        );
        assert_eq!(
            specify(&[1.0, 2.0], &v, PNorm::General(0.0)),
            Err(Error::InvalidP(0.0))
        );
    }

    #[test]
    fn single_element() {
        let v = reference(&[3.25]);
        for p in [PNorm::P1, PNorm::P2, PNorm::PInf, PNorm::General(4.0)] {
            let y = specify(&["only"], &v, p).unwrap();
            assert_eq!(y, vec![3.25]);
            assert_eq!(specification_error(&y, &v, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn merged_values_detected() {
        // Reference ties make both groups land on the same value.
        let v = reference(&[1.0, 1.0, 1.0, 1.0]);
        let s = specify_detailed(&[0, 0, 1, 1], &v, PNorm::P2).unwrap();
        assert!(s.has_merged_values());
        let v = reference(&[0.0, 1.0, 2.0, 3.0]);
        let s = specify_detailed(&[0, 0, 1, 1], &v, PNorm::P2).unwrap();
        assert!(!s.has_merged_values());
    }

    fn sorted_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, len).prop_map(|mut v| {
            v.sort_by(f64::total_cmp);
            v
        })
    }

    fn norms() -> impl Strategy<Value = PNorm> {
        prop_oneof![
            Just(PNorm::P1),
            Just(PNorm::P2),
            Just(PNorm::PInf),
            (1.0f64..6.0).prop_map(PNorm::General),
        ]
    }

    proptest! {
        #[test]
        fn barycenter_within_slice(slice in sorted_vec(1..20), p in norms()) {
            let u = frechet_p_mean(&slice, p).unwrap();
            prop_assert!(u >= slice[0] && u <= slice[slice.len() - 1]);
        }

        #[test]
        fn solver_agrees_with_closed_forms(slice in sorted_vec(1..20)) {
            let scale = slice.iter().fold(1.0f64, |m, s| m.max(s.abs()));
            let mean = frechet_p_mean(&slice, PNorm::P2).unwrap();
            let solved = frechet_p_mean(&slice, PNorm::General(2.0)).unwrap();
            prop_assert!((mean - solved).abs() <= 1e-8 * scale, "{} vs {}", mean, solved);
            if slice.len() % 2 == 1 {
                let median = frechet_p_mean(&slice, PNorm::P1).unwrap();
                let solved = frechet_p_mean(&slice, PNorm::General(1.0)).unwrap();
                prop_assert!((median - solved).abs() <= 1e-8 * scale, "{} vs {}", median, solved);
            }
        }

        #[test]
        fn solver_beats_neighbours(slice in sorted_vec(2..12), p in 1.0f64..8.0) {
            let u = frechet_p_mean(&slice, PNorm::General(p)).unwrap();
            let objective = |t: f64| -> f64 { slice.iter().map(|s| (t - s).abs().powf(p)).sum() };
            let h = 1e-4 * (slice[slice.len() - 1] - slice[0]).max(1e-12);
            let f = objective(u);
            prop_assert!(f <= objective(u + h) * (1.0 + 1e-12) + 1e-300);
            prop_assert!(f <= objective(u - h) * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn order_preserving_and_group_consistent(
            x in prop::collection::vec(0u8..5, 1..40),
            noise in prop::collection::vec(-50.0f64..50.0, 40),
            p in norms(),
        ) {
            let mut v: Vec<f64> = noise[..x.len()].to_vec();
            v.sort_by(f64::total_cmp);
            let s = specify_detailed(&x, &reference(&v), p).unwrap();
            prop_assert!(s.unique_values.windows(2).all(|w| w[0] <= w[1]));
            for i in 0..x.len() {
                for k in 0..x.len() {
                    if x[i] == x[k] {
                        prop_assert_eq!(s.values[i], s.values[k]);
                    }
                    if x[i] < x[k] {
                        prop_assert!(s.values[i] <= s.values[k]);
                    }
                }
            }
        }

        #[test]
        fn distinct_inputs_are_exact(
            v in sorted_vec(1..40),
            p in norms(),
            seed in any::<u32>(),
        ) {
            let x: Vec<u64> = (0..v.len() as u64)
                .map(|i| (i.wrapping_mul(2654435761) ^ seed as u64) % 1_000_003 * 64 + i)
                .collect();
            let r = reference(&v);
            let y = specify(&x, &r, p).unwrap();
            prop_assert_eq!(specification_error(&y, &r, p).unwrap(), 0.0);
        }

        #[test]
        fn group_locality(
            x in prop::collection::vec(0u8..4, 2..24),
            v in sorted_vec(24..25),
            bump in 0.1f64..10.0,
            p in norms(),
        ) {
            let n = x.len();
            let v: Vec<f64> = v[..n].to_vec();
            let dec = decompose(&x).unwrap();
            let u = optimal_unique_values(&dec, &reference(&v), p).unwrap();
            // Shift everything after group 0 upwards; order is preserved.
            let cut = dec.offsets()[1];
            let shifted: Vec<f64> = v.iter().enumerate()
                .map(|(i, &val)| if i >= cut { val + bump } else { val })
                .collect();
            let u2 = optimal_unique_values(&dec, &reference(&shifted), p).unwrap();
            prop_assert_eq!(u[0], u2[0]);
        }

        #[test]
        fn assignment_is_idempotent(
            x in prop::collection::vec(0u8..6, 1..30),
            v in sorted_vec(30..31),
            p in prop_oneof![Just(PNorm::P1), Just(PNorm::P2), Just(PNorm::PInf)],
        ) {
            let v: Vec<f64> = v[..x.len()].to_vec();
            let s = specify_detailed(&x, &reference(&v), p).unwrap();
            prop_assume!(!s.has_merged_values());
            let again = specify(&x, &SortedReference::from_unsorted(s.values.clone()).unwrap(), p).unwrap();
            prop_assert_eq!(again, s.values);
        }
    }
}
