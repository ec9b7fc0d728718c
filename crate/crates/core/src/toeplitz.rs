//! The lower block-triangular, block-Toeplitz operator `L_m` built from a
//! matrix polynomial, its structured product with finitely supported block
//! vectors, and the coefficient scaling `ε → γε`, `A_ℓ → γ^{-ℓ} A_ℓ`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::norms::{two_norm_estimate, DEFAULT_TOL};
use crate::linalg::SparseMatrix;
use crate::scalar::Scalar;

/// Default limit on `m·n` for [`assemble_lm`].
pub const DEFAULT_ASSEMBLY_CAP: usize = 200_000;

/// `A(ε) = A_0 + ε A_1 + … + ε^N A_N` with square sparse coefficients of
/// a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial<T> {
    coeffs: Vec<SparseMatrix<T>>,
}

impl<T: Scalar> MatrixPolynomial<T> {
    pub fn new(coeffs: Vec<SparseMatrix<T>>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("matrix polynomial needs at least A_0".into()))?;
        let n = first.n_rows();
        for (l, a) in coeffs.iter().enumerate() {
            if a.n_rows() != n || a.n_cols() != n {
                return Err(Error::dims(format!(
                    "coefficient A_{l} is {}x{}, expected {n}x{n}",
                    a.n_rows(),
                    a.n_cols()
                )));
            }
        }
        Ok(MatrixPolynomial { coeffs })
    }

    /// Degree `N`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient dimension `n`.
    pub fn dim(&self) -> usize {
        self.coeffs[0].n_rows()
    }

    pub fn coeff(&self, l: usize) -> &SparseMatrix<T> {
        &self.coeffs[l]
    }

    pub fn coeffs(&self) -> &[SparseMatrix<T>] {
        &self.coeffs
    }

    /// Assembles `A(ε)`.
    pub fn at(&self, eps: T) -> SparseMatrix<T> {
        let mut weights = Vec::with_capacity(self.coeffs.len());
        let mut w = T::one();
        for _ in &self.coeffs {
            weights.push(w);
            w *= eps;
        }
        let refs: Vec<_> = self.coeffs.iter().collect();
        SparseMatrix::linear_combination(&refs, &weights).expect("coefficients share a shape")
    }

    /// `A(ε) x` without assembling `A(ε)`.
    pub fn apply(&self, eps: T, x: &DVector<T>) -> Result<DVector<T>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::dims(format!("vector length {} vs dimension {n}", x.len())));
        }
        // Horner: (((A_N x) ε + A_{N-1} x) ε + …)
        let mut y = DVector::zeros(n);
        for a in self.coeffs.iter().rev() {
            y *= eps;
            a.spmv_acc(x.as_slice(), y.as_mut_slice());
        }
        Ok(y)
    }

    pub fn to_complex(&self) -> MatrixPolynomial<num_complex::Complex64> {
        MatrixPolynomial {
            coeffs: self.coeffs.iter().map(SparseMatrix::to_complex).collect(),
        }
    }

    /// `‖A_ℓ‖₂` for every coefficient.
    pub fn coefficient_norms(&self, tol: f64) -> Result<Vec<f64>> {
        self.coeffs.iter().map(|a| two_norm_estimate(a, tol)).collect()
    }
}

/// A block vector `vec(x_1, …, x_j, 0, 0, …)` storing only its leading
/// `j` blocks; every block beyond them is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredVector<T> {
    block_size: usize,
    data: Vec<T>,
}

impl<T: Scalar> StructuredVector<T> {
    pub fn new(block_size: usize, data: Vec<T>) -> Result<Self> {
        if block_size == 0 || data.is_empty() || !data.len().is_multiple_of(block_size) {
            return Err(Error::dims(format!(
                "length {} is not a positive multiple of block size {block_size}",
                data.len()
            )));
        }
        Ok(StructuredVector { block_size, data })
    }

    pub fn from_blocks(blocks: &[DVector<T>]) -> Result<Self> {
        let n = blocks.first().map_or(0, |b| b.len());
        if blocks.iter().any(|b| b.len() != n) {
            return Err(Error::dims("blocks of unequal length"));
        }
        Self::new(n, blocks.iter().flat_map(|b| b.iter().copied()).collect())
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Number of explicitly stored blocks `j`.
    pub fn num_blocks(&self) -> usize {
        self.data.len() / self.block_size
    }

    pub fn block(&self, i: usize) -> &[T] {
        &self.data[i * self.block_size..(i + 1) * self.block_size]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// Materializes the first `m` blocks (zero padded).
    pub fn to_dense(&self, m: usize) -> DVector<T> {
        let len = m * self.block_size;
        let mut v = DVector::zeros(len);
        let k = self.data.len().min(len);
        v.as_mut_slice()[..k].copy_from_slice(&self.data[..k]);
        v
    }
}

/// Assembles the `mn × mn` matrix `L_m` whose block `(i, j)` is `A_{i-j}`
/// for `0 ≤ i-j ≤ min(m-1, N)`.
pub fn assemble_lm<T: Scalar>(poly: &MatrixPolynomial<T>, m: usize) -> Result<SparseMatrix<T>> {
    assemble_lm_capped(poly, m, DEFAULT_ASSEMBLY_CAP)
}

pub fn assemble_lm_capped<T: Scalar>(poly: &MatrixPolynomial<T>, m: usize, cap: usize) -> Result<SparseMatrix<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("L_m needs m >= 1".into()));
    }
    let n = poly.dim();
    let size = m.saturating_mul(n);
    if size > cap {
        return Err(Error::CapExceeded {
            what: "assembled L_m",
            size,
            limit: cap,
        });
    }
    let band = poly.degree().min(m - 1);
    let mut triplets = Vec::new();
    for bi in 0..m {
        for d in 0..=band.min(bi) {
            let bj = bi - d;
            triplets.extend(
                poly.coeff(d)
                    .triplets()
                    .map(|(i, j, v)| (bi * n + i, bj * n + j, v)),
            );
        }
    }
    SparseMatrix::from_triplets(size, size, &triplets)
}

/// `y = L_∞ x` for `x` with `j` nonzero blocks. The result has `j + N`
/// blocks, `y_ℓ = Σ_{i=max(0,ℓ-j)}^{min(N,ℓ-1)} A_i x_{ℓ-i}` (1-based).
pub fn structured_matvec<T: Scalar>(
    poly: &MatrixPolynomial<T>,
    x: &StructuredVector<T>,
) -> Result<StructuredVector<T>> {
    let n = poly.dim();
    if x.block_size() != n {
        return Err(Error::dims(format!(
            "block size {} does not match dimension {n}",
            x.block_size()
        )));
    }
    let j = x.num_blocks();
    let nn = poly.degree();
    let mut out = vec![T::zero(); (j + nn) * n];
    // 0-based output block l gathers A_i x_{l-i}, i ascending
    for (l, y) in out.chunks_mut(n).enumerate() {
        let lo = l.saturating_sub(j - 1);
        let hi = nn.min(l);
        for i in lo..=hi {
            poly.coeff(i).spmv_acc(x.block(l - i), y);
        }
    }
    StructuredVector::new(n, out)
}

/// `Σ_m = diag(1, γ, …, γ^{m-1}) ⊗ I_n`, represented by `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingTransform {
    gamma: f64,
}

impl ScalingTransform {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(ScalingTransform { gamma })
        } else {
            Err(Error::InvalidArgument(format!("scaling gamma must be finite and positive, got {gamma}")))
        }
    }

    pub fn identity() -> Self {
        ScalingTransform { gamma: 1.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `γ^{-ℓ}`
    pub fn coefficient_factor(&self, l: usize) -> f64 {
        self.gamma.powi(-(l as i32))
    }
}

/// `γ = max_{1≤ℓ≤N} ‖A_ℓ‖^{1/ℓ}` from precomputed norms `[‖A_0‖, ‖A_1‖, …]`;
/// 1 when every `A_ℓ`, `ℓ ≥ 1`, vanishes.
pub fn gamma_from_norms(norms: &[f64]) -> f64 {
    let g = norms
        .iter()
        .enumerate()
        .skip(1)
        .map(|(l, &nrm)| nrm.powf(1.0 / l as f64))
        .fold(0.0_f64, f64::max);
    if g > 0.0 && g.is_finite() {
        g
    } else {
        1.0
    }
}

/// The balancing choice `γ = max_{1≤ℓ≤N} ‖A_ℓ‖^{1/ℓ}`.
pub fn heuristic_gamma<T: Scalar>(poly: &MatrixPolynomial<T>) -> Result<f64> {
    let norms = poly.coefficient_norms(DEFAULT_TOL)?;
    Ok(gamma_from_norms(&norms))
}

/// Coefficients `γ^{-ℓ} A_ℓ`. The scaled polynomial satisfies
/// `Â(γε) = A(ε)`.
pub fn apply_scaling<T: Scalar>(poly: &MatrixPolynomial<T>, s: ScalingTransform) -> MatrixPolynomial<T> {
    MatrixPolynomial {
        coeffs: poly
            .coeffs
            .iter()
            .enumerate()
            .map(|(l, a)| a.scale(T::of_real(s.coefficient_factor(l))))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::expm;
    use proptest::prelude::*;

    fn dense_poly(n: usize, degree: usize, seed: &[f64]) -> MatrixPolynomial<f64> {
        let mut k = 0;
        let coeffs = (0..=degree)
            .map(|_| {
                let mut t = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        let v = seed[k % seed.len()];
                        k += 1;
                        if v.abs() > 0.3 {
                            t.push((i, j, v));
                        }
                    }
                }
                SparseMatrix::from_triplets(n, n, &t).unwrap()
            })
            .collect();
        MatrixPolynomial::new(coeffs).unwrap()
    }

    #[test]
    fn rejects_mismatched_coefficients() {
        let err = MatrixPolynomial::new(vec![SparseMatrix::<f64>::identity(2), SparseMatrix::identity(3)]);
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
        assert!(MatrixPolynomial::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn single_block_is_a0() {
        let p = dense_poly(3, 2, &[0.5, -1.0, 0.7, 0.2, 0.9]);
        assert_eq!(assemble_lm(&p, 1).unwrap(), *p.coeff(0));
    }

    #[test]
    fn two_blocks_first_order() {
        let p = dense_poly(2, 1, &[0.5, -1.0, 0.7, 0.4, 0.9, -0.8]);
        let l = assemble_lm(&p, 2).unwrap().to_dense();
        let a0 = p.coeff(0).to_dense();
        let a1 = p.coeff(1).to_dense();
        assert_eq!(l.view((0, 0), (2, 2)), a0);
        assert_eq!(l.view((2, 2), (2, 2)), a0);
        assert_eq!(l.view((2, 0), (2, 2)), a1);
        assert!(l.view((0, 2), (2, 2)).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn band_is_truncated_to_m_minus_one() {
        let p = MatrixPolynomial::new((1..=6).map(|l| SparseMatrix::identity(1).scale(l as f64)).collect()).unwrap();
        let l = assemble_lm(&p, 3).unwrap().to_dense();
        // only A_0 = 1, A_1 = 2, A_2 = 3 appear
        let expect = nalgebra::DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 3.0, 2.0, 1.0]);
        assert_eq!(l, expect);
    }

    #[test]
    fn assembly_cap() {
        let p = MatrixPolynomial::new(vec![SparseMatrix::<f64>::identity(10)]).unwrap();
        assert!(matches!(assemble_lm_capped(&p, 11, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn first_step_produces_coefficient_products() {
        let p = dense_poly(3, 2, &[0.5, -1.0, 0.7, 0.4, 0.9, -0.8, 0.35]);
        let u0 = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let y = structured_matvec(&p, &StructuredVector::from_blocks(std::slice::from_ref(&u0)).unwrap()).unwrap();
        assert_eq!(y.num_blocks(), 3);
        for l in 0..3 {
            assert_eq!(y.block(l), p.coeff(l).spmv(&u0).unwrap().as_slice());
        }
    }

    #[test]
    fn degree_zero_is_block_diagonal() {
        let p = dense_poly(3, 0, &[0.5, -1.0, 0.7, 0.4, 0.9, -0.8, 0.35]);
        let blocks: Vec<_> = (0..3).map(|k| DVector::from_fn(3, |i, _| (i + k) as f64)).collect();
        let y = structured_matvec(&p, &StructuredVector::from_blocks(&blocks).unwrap()).unwrap();
        assert_eq!(y.num_blocks(), 3);
        for (l, b) in blocks.iter().enumerate() {
            assert_eq!(y.block(l), p.coeff(0).spmv(b).unwrap().as_slice());
        }
    }

    #[test]
    fn block_size_mismatch() {
        let p = dense_poly(3, 1, &[0.5, -1.0]);
        let x = StructuredVector::new(2, vec![1.0; 4]).unwrap();
        assert!(structured_matvec(&p, &x).is_err());
    }

    #[test]
    fn heuristic_gamma_values() {
        assert_eq!(gamma_from_norms(&[5.0, 4.0]), 4.0);
        assert!((gamma_from_norms(&[5.0, 2.0, 9.0]) - 3.0).abs() < 1e-15);
        assert_eq!(gamma_from_norms(&[5.0, 0.0, 0.0]), 1.0);
        assert_eq!(gamma_from_norms(&[5.0]), 1.0);
        let p = MatrixPolynomial::new(vec![
            SparseMatrix::identity(2),
            SparseMatrix::from_diagonal(&[2.0, -1.0]),
            SparseMatrix::from_diagonal(&[1.0, 9.0]),
        ])
        .unwrap();
        assert!((heuristic_gamma(&p).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unit_scaling_is_identity() {
        let p = dense_poly(3, 2, &[0.5, -1.0, 0.7, 0.4, 0.9, -0.8, 0.35]);
        assert_eq!(apply_scaling(&p, ScalingTransform::identity()), p);
        assert!(ScalingTransform::new(0.0).is_err());
        assert!(ScalingTransform::new(f64::INFINITY).is_err());
    }

    #[test]
    fn scaled_polynomial_at_scaled_eps() {
        let p = dense_poly(4, 1, &[0.5, -1.0, 0.7, 0.4, 0.9, -0.8, 0.35]);
        let s = ScalingTransform::new(2.0).unwrap();
        let q = apply_scaling(&p, s);
        assert_eq!(q.coeff(1), &p.coeff(1).scale(0.5));
        let u = DVector::from_vec(vec![1.0, 0.3, -0.7, 2.0]);
        for eps in [0.0, 0.1, -1.3] {
            let lhs = q.apply(2.0 * eps, &u).unwrap();
            let rhs = p.apply(eps, &u).unwrap();
            assert!((lhs - rhs).amax() < 1e-14);
        }
    }

    #[test]
    fn scaling_similarity_of_exponential() {
        // exp(t L_m) ũ0 = Σ_m exp(t L̂_m) ũ0 on n=3, m=4, N=1
        let p = dense_poly(3, 1, &[0.5, -1.0, 0.7, 0.4, 0.9, -0.8, 0.35, 1.2]);
        let gamma = 2.5;
        let q = apply_scaling(&p, ScalingTransform::new(gamma).unwrap());
        let (m, n, t) = (4, 3, 0.7);
        let mut u = DVector::zeros(m * n);
        u[0] = 1.0;
        u[1] = -0.5;
        u[2] = 2.0;
        let lhs = expm(&(assemble_lm(&p, m).unwrap().to_dense() * t)).unwrap() * &u;
        let mut rhs = expm(&(assemble_lm(&q, m).unwrap().to_dense() * t)).unwrap() * &u;
        for b in 0..m {
            for i in 0..n {
                rhs[b * n + i] *= gamma.powi(b as i32);
            }
        }
        assert!((lhs - rhs).amax() < 1e-10);
    }

    proptest! {
        #[test]
        fn structured_matches_assembled(
            n in 1usize..=5,
            degree in 0usize..=3,
            j in 1usize..=4,
            seed in prop::collection::vec(-1.0f64..1.0, 8..80),
        ) {
            let p = dense_poly(n, degree, &seed);
            let data: Vec<f64> = (0..j * n).map(|i| seed[(i * 7 + 3) % seed.len()] + 0.1).collect();
            let x = StructuredVector::new(n, data).unwrap();
            let y = structured_matvec(&p, &x).unwrap();
            let m = j + degree + 1;
            let expect = assemble_lm(&p, m).unwrap().spmv(&x.to_dense(m)).unwrap();
            let got = y.to_dense(m);
            let scale = expect.amax().max(1.0);
            prop_assert!((got - expect).amax() <= 1e-14 * scale);
        }
    }
}
