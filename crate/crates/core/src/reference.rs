//! Dense brute-force oracles. Desk-scale only.

use nalgebra::{DMatrix, DVector};

use crate::arnoldi::{KrylovDecomposition, BREAKDOWN_TOL};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::matfun::expm;
use crate::scalar::{dot, norm2, Scalar};
use crate::toeplitz::{assemble_lm_capped, MatrixPolynomial};

pub const DEFAULT_DENSE_CAP: usize = 2000;
pub const DENSE_CAP_ENV: &str = "PARAMEXPMV_DENSE_CAP";

/// Largest dense dimension the oracles accept: `PARAMEXPMV_DENSE_CAP` if
/// set to a positive integer, else 2000.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_DENSE_CAP)
}

fn check_cap(what: &'static str, size: usize) -> Result<()> {
    let limit = dense_cap();
    if size > limit {
        return Err(Error::CapExceeded { what, size, limit });
    }
    Ok(())
}

/// `exp(tA(ε)) u_0`.
pub fn dense_solution<T: Scalar>(poly: &MatrixPolynomial<T>, u0: &DVector<T>, t: f64, eps: T) -> Result<DVector<T>> {
    let n = poly.dim();
    check_cap("dense solution", n)?;
    if u0.len() != n {
        return Err(Error::dims(format!("initial vector has length {}, expected {n}", u0.len())));
    }
    let a = poly.at(eps).to_dense() * T::of_real(t);
    Ok(expm(&a)? * u0)
}

/// `c_0(t), …, c_{m-1}(t)` from `exp(tL_m)(e_1 ⊗ u_0)`.
pub fn dense_coefficients<T: Scalar>(
    poly: &MatrixPolynomial<T>,
    u0: &DVector<T>,
    t: f64,
    m: usize,
) -> Result<Vec<DVector<T>>> {
    let n = poly.dim();
    check_cap("dense coefficients", m.saturating_mul(n))?;
    if u0.len() != n {
        return Err(Error::dims(format!("initial vector has length {}, expected {n}", u0.len())));
    }
    let l = assemble_lm_capped(poly, m, usize::MAX)?.to_dense() * T::of_real(t);
    let e = expm(&l)?;
    // only the first block column of exp(tL_m) meets e_1 ⊗ u_0
    let c = e.columns(0, n) * u0;
    Ok((0..m).map(|i| c.rows(i * n, n).into_owned()).collect())
}

/// Plain Arnoldi on an explicit matrix: `B Q_p = Q_{p+1} H̲_p`, classical
/// Gram–Schmidt applied twice, `h_{ℓ+1,ℓ} ≥ 0`. Stops at breakdown.
pub fn textbook_arnoldi<T: Scalar>(b: &SparseMatrix<T>, v0: &DVector<T>, p: usize) -> Result<KrylovDecomposition<T>> {
    if !b.is_square() || b.n_rows() != v0.len() {
        return Err(Error::dims(format!(
            "{}x{} matrix with start vector of length {}",
            b.n_rows(),
            b.n_cols(),
            v0.len()
        )));
    }
    let beta = norm2(v0.as_slice());
    if beta == 0.0 {
        return Err(Error::ZeroInitialVector);
    }
    let bd: DMatrix<T> = b.to_dense();
    let mut basis: Vec<Vec<T>> = vec![v0.iter().map(|v| v.scale(1.0 / beta)).collect()];
    let mut hess: Vec<Vec<T>> = Vec::new();
    let mut breakdown = false;
    for j in 0..p {
        let q = DVector::from_column_slice(&basis[j]);
        let mut w: Vec<T> = (&bd * q).iter().copied().collect();
        let w_norm = norm2(&w);
        let mut h = vec![T::zero(); j + 2];
        for _ in 0..2 {
            let c: Vec<T> = basis.iter().map(|qi| dot(qi, &w)).collect();
            for (i, qi) in basis.iter().enumerate() {
                for (wv, qv) in w.iter_mut().zip(qi) {
                    *wv -= c[i] * *qv;
                }
                h[i] += c[i];
            }
        }
        let alpha = norm2(&w);
        h[j + 1] = T::of_real(alpha);
        hess.push(h);
        if alpha <= BREAKDOWN_TOL * w_norm {
            breakdown = true;
            break;
        }
        basis.push(w.iter().map(|v| v.scale(1.0 / alpha)).collect());
    }
    Ok(KrylovDecomposition::from_parts(b.n_rows(), 0, beta, basis, hess, breakdown))
}
