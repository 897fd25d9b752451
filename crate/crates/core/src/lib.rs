//! Certified lower bounds on the border rank of 3-tensors, with a focus on
//! the matrix multiplication tensor `M<m,n,l>`.
//!
//! Bounds come from exact ranks of Koszul flattenings, either of the full
//! tensor or of its restriction to the top `SL_2`-summand of the `A` factor,
//! and are cross-checked against closed-form kernel dimensions computed with
//! Schur functors.

pub mod binaryforms;
pub mod bounds;
pub mod error;
pub mod exterior;
pub mod matrix;
pub mod rank;
pub mod repcomb;
pub mod scalars;
pub mod tensor;

pub use error::{Error, Result};
pub use matrix::SparseMatrix;
pub use scalars::{FieldTag, PrimeField, Rational, Scalar};
pub use tensor::Tensor3;
