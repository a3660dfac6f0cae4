//! Pointwise Lorentzian multilinear and exterior algebra.
//!
//! Signature is fixed to (−,+,…,+). Forms and multivectors are stored as dense,
//! fully antisymmetric arrays; all `:` and `·` contractions between
//! antisymmetric objects carry the 1/k! normalization.

mod form;
mod general;
pub mod index;
mod metric;

pub use form::{volume_form, Alt, Form, KVector, Lower, Upper};
pub use general::{colon, trace_tensor_product, vector_covector, Slot, Tensor};
pub use metric::{Metric, Orientation};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot {slot} must be {expected:?} for this operation")]
    VarianceMismatch { slot: usize, expected: Slot },
    #[error("degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("{0} needs degree ≥ 1")]
    ZeroDegree(&'static str),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("array is not antisymmetric")]
    NotAntisymmetric,
    #[error("metric is not symmetric")]
    NotSymmetric,
    #[error("metric is degenerate: {0}")]
    Degenerate(String),
    #[error("metric has {0} negative eigenvalues; exactly one is required")]
    NotLorentzian(usize),
    #[error("orientation sign must be ±1, got {0}")]
    BadOrientation(i8),
    #[error("contraction needs dual variances")]
    NotDual,
}
