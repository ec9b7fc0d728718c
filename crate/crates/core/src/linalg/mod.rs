//! Sparse and dense matrix primitives.

pub mod mmio;
pub mod norms;
pub mod sparse;

pub use norms::{log_norm, two_norm_estimate};
pub use sparse::SparseMatrix;

/// Small dense matrices (projected Hessenberg matrices, dense oracles).
pub type DenseMatrix<T> = nalgebra::DMatrix<T>;

/// Dense column vector.
pub type Vector<T> = nalgebra::DVector<T>;
