//! Explicit `(t, ε)`-parameterized solutions of
//! `u'(t, ε) = (A_0 + εA_1 + … + ε^N A_N) u(t, ε)`.
//!
//! One run of an infinite Arnoldi iteration on the block-Toeplitz operator
//! built from the coefficients yields approximations `c̃_ℓ(t)` of the Taylor
//! coefficients of `u` in `ε`; afterwards `u(t, ε)` can be evaluated for any
//! `t` and `ε` at the cost of a small dense exponential. A priori bounds and
//! a posteriori estimates accompany every evaluation.

pub mod arnoldi;
pub mod error;
pub mod linalg;
pub mod matfun;
pub mod problems;
pub mod reference;
pub mod scalar;
pub mod solver;
pub mod toeplitz;

pub use error::{Error, Result};
pub use scalar::Scalar;
