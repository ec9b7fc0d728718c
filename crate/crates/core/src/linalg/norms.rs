//! Spectral norm and logarithmic norm estimates.
//!
//! Small operators go through a dense reduction. Larger ones use a Lanczos
//! iteration with full reorthogonalization on the relevant Hermitian
//! operator (`A^H A` for the norm, `(A + A^H)/2` for the logarithmic norm),
//! stopped once the largest Ritz value carries a residual below the
//! requested tolerance.

use nalgebra::{DMatrix, SymmetricEigen};

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, norm2, Scalar};

/// Operators with `min(rows, cols)` at or below this size are handled densely.
pub const DENSE_LIMIT: usize = 64;

/// Default relative tolerance for the estimates.
pub const DEFAULT_TOL: f64 = 1e-8;

const CHECK_EVERY: usize = 5;

/// Estimates `‖A‖₂` to relative accuracy `tol`.
pub fn two_norm_estimate<T: Scalar>(a: &SparseMatrix<T>, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if a.nnz() == 0 || a.n_rows() == 0 || a.n_cols() == 0 {
        return Ok(0.0);
    }
    if a.n_rows().min(a.n_cols()) <= DENSE_LIMIT {
        let s = a.to_dense().singular_values();
        return Ok(s.iter().fold(0.0_f64, |m, &v| m.max(v)));
    }
    let mut tmp = vec![T::zero(); a.n_rows()];
    let lambda = lanczos_max(
        a.n_cols(),
        |x, y| {
            tmp.iter_mut().for_each(|v| *v = T::zero());
            a.spmv_acc(x, &mut tmp);
            y.iter_mut().for_each(|v| *v = T::zero());
            a.spmv_adjoint_acc(&tmp, y);
        },
        |theta, _| tol * theta.abs(),
        "two_norm_estimate",
    )?;
    Ok(lambda.max(0.0).sqrt())
}

/// Estimates the logarithmic norm `μ(A)`, the largest eigenvalue of the
/// Hermitian part of `A`, to within `tol·(‖A‖₂ + 1)`.
pub fn log_norm<T: Scalar>(a: &SparseMatrix<T>, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !a.is_square() {
        return Err(Error::dims(format!(
            "log_norm needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let n = a.n_rows();
    if n == 0 {
        return Err(Error::InvalidArgument("log_norm of an empty matrix".into()));
    }
    if a.nnz() == 0 {
        return Ok(0.0);
    }
    if n <= DENSE_LIMIT {
        let d = a.to_dense();
        let herm = (&d + d.adjoint()) * T::of_real(0.5);
        let eig = SymmetricEigen::new(herm);
        return Ok(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    let half = T::of_real(0.5);
    let mut tmp = vec![T::zero(); n];
    lanczos_max(
        n,
        |x, y| {
            tmp.iter_mut().for_each(|v| *v = T::zero());
            a.spmv_acc(x, &mut tmp);
            a.spmv_adjoint_acc(x, &mut tmp);
            for (yi, ti) in y.iter_mut().zip(&tmp) {
                *yi = *ti * half;
            }
        },
        |_, spread| tol * (spread + 1.0),
        "log_norm",
    )
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// Deterministic, irregular start vector.
fn start_vector<T: Scalar>(n: usize) -> Vec<T> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let v: Vec<T> = (0..n)
        .map(|i| T::of_real(((i as f64 + 1.0) * GOLDEN).fract() + 0.25))
        .collect();
    let nrm = norm2(&v);
    v.into_iter().map(|x| x.unscale(nrm)).collect()
}

/// Largest eigenvalue of the Hermitian operator applied by `apply`
/// (`apply(x, y)` must overwrite `y` with `B x`).
///
/// `threshold(theta_max, spread)` gives the admissible residual, where
/// `spread` is the largest Ritz value magnitude seen so far.
pub(crate) fn lanczos_max<T: Scalar>(
    n: usize,
    mut apply: impl FnMut(&[T], &mut [T]),
    threshold: impl Fn(f64, f64) -> f64,
    what: &'static str,
) -> Result<f64> {
    let max_iter = n;
    let mut basis: Vec<Vec<T>> = vec![start_vector(n)];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![T::zero(); n];
    let mut theta = f64::NAN;

    for k in 0..max_iter {
        apply(&basis[k], &mut w);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(what));
        }
        let alpha = dot(&basis[k], &w).real();
        alphas.push(alpha);
        // two passes of full reorthogonalization
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let beta = norm2(&w);
        let last = k + 1 == max_iter;
        let scale = alphas.iter().chain(&betas).fold(0.0_f64, |m, v| m.max(v.abs()));
        let invariant = beta <= 1e-14 * scale.max(f64::MIN_POSITIVE);

        if invariant || last || (k + 1) % CHECK_EVERY == 0 {
            let (th, s_last, spread) = largest_ritz(&alphas, &betas);
            theta = th;
            if invariant || last || beta * s_last.abs() <= threshold(th, spread) {
                return Ok(theta);
            }
        }
        betas.push(beta);
        let inv = 1.0 / beta;
        basis.push(w.iter().map(|v| v.scale(inv)).collect());
    }
    Err(Error::NoConvergence {
        what,
        iterations: max_iter,
        last: theta,
    })
}

/// Largest eigenvalue of the symmetric tridiagonal matrix, the last entry
/// of its eigenvector, and the spectral radius.
fn largest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, f64, f64) {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(k - 1).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(t);
    let (imax, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    let spread = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (theta, eig.eigenvectors[(k - 1, imax)], spread)
}
