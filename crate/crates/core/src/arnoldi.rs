//! Arnoldi's method on the infinite block-Toeplitz operator `L_∞`.
//!
//! Basis vector `q_ℓ` (1-based) has nonzeros only in its leading
//! `1 + (ℓ-1)N` blocks, so each column is stored as exactly that prefix and
//! the zero tail stays implicit. Orthogonalization is classical
//! Gram–Schmidt applied twice.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{dot, norm2, Scalar};
use crate::toeplitz::{structured_matvec, MatrixPolynomial, StructuredVector};

/// Relative size of the orthogonalized residual at which the Krylov space
/// is declared invariant.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Outcome of one Arnoldi iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Extended,
    /// The new direction vanished: the Krylov subspace is invariant and the
    /// decomposition so far is exact.
    Breakdown,
}

/// Orthonormal basis `Q` with the Hessenberg matrix `H̲` satisfying
/// `L_∞ Q_p = Q_{p+1} H̲_p`.
#[derive(Debug, Clone)]
pub struct KrylovDecomposition<T> {
    n: usize,
    degree: usize,
    beta: f64,
    basis: Vec<Vec<T>>,
    // column ℓ (0-based) holds h_{1..ℓ+2, ℓ+1}
    hess: Vec<Vec<T>>,
    breakdown: bool,
}

impl<T: Scalar> KrylovDecomposition<T> {
    /// `β = ‖u_0‖`, `q_1 = u_0/β`, empty `H̲`.
    pub fn start(poly: &MatrixPolynomial<T>, u0: &DVector<T>) -> Result<Self> {
        if u0.len() != poly.dim() {
            return Err(Error::dims(format!(
                "initial vector has length {}, polynomial dimension is {}",
                u0.len(),
                poly.dim()
            )));
        }
        if u0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial vector"));
        }
        let beta = norm2(u0.as_slice());
        if beta == 0.0 {
            return Err(Error::ZeroInitialVector);
        }
        let inv = 1.0 / beta;
        Ok(KrylovDecomposition {
            n: poly.dim(),
            degree: poly.degree(),
            beta,
            basis: vec![u0.iter().map(|v| v.scale(inv)).collect()],
            hess: Vec::new(),
            breakdown: false,
        })
    }

    pub(crate) fn from_parts(
        n: usize,
        degree: usize,
        beta: f64,
        basis: Vec<Vec<T>>,
        hess: Vec<Vec<T>>,
        breakdown: bool,
    ) -> Self {
        KrylovDecomposition {
            n,
            degree,
            beta,
            basis,
            hess,
            breakdown,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `‖u_0‖`
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Completed iterations `p`.
    pub fn steps(&self) -> usize {
        self.hess.len()
    }

    pub fn is_breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn num_basis_vectors(&self) -> usize {
        self.basis.len()
    }

    /// Stored prefix of basis column `i` (0-based).
    pub fn basis_column(&self, i: usize) -> &[T] {
        &self.basis[i]
    }

    /// Number of nonzero blocks of basis column `i` (0-based): `1 + iN`.
    pub fn column_blocks(&self, i: usize) -> usize {
        1 + i * self.degree
    }

    /// Total scalars held by the basis.
    pub fn storage_len(&self) -> usize {
        self.basis.iter().map(Vec::len).sum()
    }

    /// Entry `h_{i+1, j+1}` (0-based indices).
    pub fn h(&self, i: usize, j: usize) -> T {
        self.hess[j].get(i).copied().unwrap_or_else(T::zero)
    }

    /// `h_{p+1,p}` for `1 ≤ p ≤ steps()`.
    pub fn subdiagonal(&self, p: usize) -> T {
        self.h(p, p - 1)
    }

    /// The `(p+1) × p` Hessenberg matrix `H̲_p`.
    pub fn hessenberg(&self) -> DMatrix<T> {
        let p = self.steps();
        DMatrix::from_fn(p + 1, p, |i, j| self.h(i, j))
    }

    /// Leading `p × p` block `H_p`.
    pub fn hessenberg_square(&self, p: usize) -> DMatrix<T> {
        DMatrix::from_fn(p, p, |i, j| self.h(i, j))
    }

    /// First `cols` basis columns zero-padded to `m` blocks.
    pub fn basis_padded(&self, cols: usize, m: usize) -> DMatrix<T> {
        let mut q = DMatrix::zeros(m * self.n, cols);
        for (j, col) in self.basis.iter().take(cols).enumerate() {
            let k = col.len().min(m * self.n);
            q.view_mut((0, j), (k, 1)).copy_from_slice(&col[..k]);
        }
        q
    }

    /// `max |Q^H Q − I|` over all stored columns.
    pub fn orthogonality_error(&self) -> f64 {
        let mut err = 0.0_f64;
        for (i, qi) in self.basis.iter().enumerate() {
            for (j, qj) in self.basis.iter().enumerate().skip(i) {
                let d = dot(qi, qj);
                let target = if i == j { T::one() } else { T::zero() };
                err = err.max((d - target).modulus());
            }
        }
        err
    }

    /// `max_ℓ ‖L q_ℓ − Σ_i h_{iℓ} q_i‖`, with `L` applied structurally.
    pub fn relation_residual(&self, poly: &MatrixPolynomial<T>) -> Result<f64> {
        let mut worst = 0.0_f64;
        for l in 0..self.steps() {
            let x = StructuredVector::new(self.n, self.basis[l].clone())?;
            let mut y = structured_matvec(poly, &x)?.into_vec();
            for (i, q) in self.basis.iter().enumerate().take(l + 2) {
                let h = self.h(i, l);
                for (yi, qi) in y.iter_mut().zip(q) {
                    *yi -= h * *qi;
                }
            }
            worst = worst.max(norm2(&y));
        }
        Ok(worst)
    }
}

/// One iteration: apply `L_∞` to the newest basis vector, orthogonalize
/// against the zero-padded previous columns (twice), normalize, and append
/// the new Hessenberg column.
pub fn arnoldi_step<T: Scalar>(
    poly: &MatrixPolynomial<T>,
    k: &mut KrylovDecomposition<T>,
) -> Result<StepOutcome> {
    if k.breakdown {
        return Ok(StepOutcome::Breakdown);
    }
    if poly.dim() != k.n || poly.degree() != k.degree {
        return Err(Error::dims(format!(
            "decomposition built for n={}, N={}; polynomial has n={}, N={}",
            k.n,
            k.degree,
            poly.dim(),
            poly.degree()
        )));
    }
    let l = k.steps();
    let x = StructuredVector::new(k.n, k.basis[l].clone())?;
    let mut y = structured_matvec(poly, &x)?.into_vec();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Arnoldi matrix-vector product"));
    }
    let y_norm = norm2(&y);

    let mut h = vec![T::zero(); l + 2];
    let mut c = vec![T::zero(); l + 1];
    for _ in 0..2 {
        for (ci, q) in c.iter_mut().zip(&k.basis) {
            *ci = dot(q, &y[..q.len()]);
        }
        for ((ci, hi), q) in c.iter().zip(h.iter_mut()).zip(&k.basis) {
            for (yv, qv) in y.iter_mut().zip(q) {
                *yv -= *ci * *qv;
            }
            *hi += *ci;
        }
    }
    let alpha = norm2(&y);
    h[l + 1] = T::of_real(alpha);
    k.hess.push(h);

    if alpha <= BREAKDOWN_TOL * y_norm {
        k.breakdown = true;
        return Ok(StepOutcome::Breakdown);
    }
    let inv = 1.0 / alpha;
    y.iter_mut().for_each(|v| *v = v.scale(inv));
    k.basis.push(y);
    Ok(StepOutcome::Extended)
}

/// Runs `p` iterations, stopping early at a breakdown.
pub fn run_arnoldi<T: Scalar>(
    poly: &MatrixPolynomial<T>,
    u0: &DVector<T>,
    p: usize,
) -> Result<KrylovDecomposition<T>> {
    let mut k = KrylovDecomposition::start(poly, u0)?;
    for _ in 0..p {
        if arnoldi_step(poly, &mut k)? == StepOutcome::Breakdown {
            break;
        }
    }
    Ok(k)
}
