use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    #[error("value at index {index} cannot be totally ordered")]
    UnorderableValue { index: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("cannot compute a barycenter of an empty slice")]
    EmptySlice,

    #[error("invalid p = {0}: p must be a real number >= 1")]
    InvalidP(f64),

    #[error("invalid plotting positions alpha = {alpha}, beta = {beta} for n = {n}: n + 1 - alpha - beta must be positive")]
    InvalidParams { alpha: f64, beta: f64, n: usize },

    #[error("invalid normal scale sigma = {0}: must be finite and positive")]
    InvalidSigma(f64),

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("reference is not sorted: element {index} is smaller than its predecessor")]
    UnsortedReference { index: usize },

    #[error("reference value at index {index} is not finite")]
    NonFiniteReference { index: usize },

    #[error("pixel count mismatch: input has {input} pixels, reference has {reference}")]
    PixelCountMismatch { input: usize, reference: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
