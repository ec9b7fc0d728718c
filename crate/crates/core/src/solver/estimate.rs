//! A posteriori error estimate.
//!
//! With `A = tL`, the Krylov error of `exp(A)q_1β` expands as
//! `β h_{p+1,p} Σ_{j≥1} (e_pᵀ φ_j(tH_p) e_1) t A^{j-1} q_{p+1}`; the first two
//! terms are kept:
//!
//! ```text
//! err ≈ t h_{p+1,p} β ( (e_pᵀφ₁e₁) q_{p+1} + (e_pᵀφ₂e₁) t L q_{p+1} )
//! ```
//!
//! truncated to `k` blocks and contracted against `[1, ε, …, ε^{k-1}]`.

use crate::error::Result;
use crate::matfun::phi_columns;
use crate::scalar::{norm2, Scalar};
use crate::toeplitz::{structured_matvec, StructuredVector};

use super::bounds::apriori_bounds;
use super::SolutionView;

/// Bounds and estimates for one `(t, ε)` after `p` iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport<T> {
    pub t: f64,
    pub eps: T,
    pub p: usize,
    /// Coefficient blocks used, `1 + N(p-1)`.
    pub k: usize,
    pub apriori_krylov: f64,
    pub apriori_truncation: f64,
    pub apriori_total: f64,
    pub aposteriori_krylov: f64,
    /// Krylov estimate plus, for `N = 1`, the truncation bound; the Krylov
    /// estimate alone otherwise.
    pub total_estimate: f64,
}

impl<'a, T: Scalar> SolutionView<'a, T> {
    /// Two-term estimate of the Krylov error of `ũ(t, ε)`; zero at breakdown.
    pub fn aposteriori_krylov(&self, t: f64, eps: T) -> Result<f64> {
        Self::check_point(t, eps)?;
        if self.is_breakdown() {
            return Ok(0.0);
        }
        let sol = self.sol;
        let kry = &sol.krylov;
        let (n, p, k) = (sol.dim(), self.p, self.k_max());

        let phi = phi_columns(&kry.hessenberg_square(p), t)?;
        let s1 = phi.phi1_col[p - 1];
        let s2 = phi.phi2_col[p - 1];
        let scale = kry.subdiagonal(p) * T::of_real(t * kry.beta());

        let q = kry.basis_column(p);
        let lq = structured_matvec(&sol.poly, &StructuredVector::new(n, q.to_vec())?)?;
        let lq = lq.as_slice();

        let eps_hat = eps * T::of_real(sol.scaling.gamma());
        let len = n * k;
        let mut acc = vec![T::zero(); n];
        // Horner over blocks k-1 … 0
        for l in (0..k).rev() {
            let r = l * n..(l + 1) * n;
            for (i, a) in r.clone().zip(acc.iter_mut()) {
                let qi = if i < q.len() { q[i] } else { T::zero() };
                let lqi = if i < lq.len() && i < len { lq[i] } else { T::zero() };
                *a = *a * eps_hat + scale * (s1 * qi + s2 * T::of_real(t) * lqi);
            }
        }
        let v = norm2(&acc);
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }

    pub fn error_report(&self, t: f64, eps: T) -> Result<ErrorReport<T>> {
        let sol = self.sol;
        let eps_hat_abs = eps.modulus() * sol.scaling.gamma();
        let b = apriori_bounds(&sol.bounds, t, eps_hat_abs, self.p, sol.degree(), sol.u0_norm());
        let est = self.aposteriori_krylov(t, eps)?;
        let total_estimate = if self.is_breakdown() {
            0.0
        } else if sol.degree() == 1 {
            est + b.truncation
        } else {
            est
        };
        Ok(ErrorReport {
            t,
            eps,
            p: self.p,
            k: self.k_max(),
            apriori_krylov: b.krylov,
            apriori_truncation: b.truncation,
            apriori_total: b.total,
            aposteriori_krylov: est,
            total_estimate,
        })
    }
}
