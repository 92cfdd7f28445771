//! Least p-norm histogram specification and quantile transformation of data
//! without local structure.
//!
//! An input is factored into its stable sort order, sorted unique values and
//! their counts ([`Decomposition`]). Every group of equal inputs receives a
//! single optimal output value, the Fréchet p-mean of the matching slice of a
//! sorted reference, and the output is rebuilt by ordered assignment. Equal
//! inputs therefore always map to equal outputs.
//!
//! ```
//! use histspec::{specify, PNorm, SortedReference};
//!
//! let reference = SortedReference::new(vec![0.0, 1.0, 4.0]).unwrap();
//! let y = specify(&[5, 5, 2], &reference, PNorm::P2).unwrap();
//! assert_eq!(y, vec![2.5, 2.5, 0.0]);
//! ```

pub mod baseline;
pub mod decomposition;
mod error;
pub mod experiment;
pub mod io;
pub mod quantile;
pub mod specification;

pub use baseline::{baseline_transform, estimate_quantiles, QuantileTable};
pub use decomposition::{argsort_stable, decompose, Decomposition};
pub use error::{Error, Result};
pub use quantile::{
    normal_inverse_cdf, quantile_transform, transform_to_reference,
    transform_to_reference_with_positions, uniform_reference, PlottingPositions, ReferenceSpec,
};
pub use specification::{
    frechet_p_mean, specification_error, specify, specify_detailed, PNorm, SortedReference,
    Specified,
};
