#![allow(dead_code)]

use nalgebra::DVector;
use paramexpmv::linalg::SparseMatrix;
use paramexpmv::toeplitz::MatrixPolynomial;
use paramexpmv::Scalar;
use rand::rngs::StdRng;
use rand::Rng;

pub fn scalar<T: Scalar>(rng: &mut StdRng, scale: f64) -> T {
    let re = rng.random_range(-scale..scale);
    let im = if T::IS_COMPLEX { rng.random_range(-scale..scale) } else { 0.0 };
    T::from_parts(re, im).unwrap()
}

pub fn sparse<T: Scalar>(rng: &mut StdRng, n: usize, density: f64, scale: f64) -> SparseMatrix<T> {
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.random_bool(density) {
                t.push((i, j, scalar(rng, scale)));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &t).unwrap()
}

pub fn polynomial<T: Scalar>(rng: &mut StdRng, n: usize, degree: usize, scale: f64) -> MatrixPolynomial<T> {
    MatrixPolynomial::new((0..=degree).map(|_| sparse(rng, n, 0.6, scale)).collect()).unwrap()
}

/// Random vector with no zero entries.
pub fn vector<T: Scalar>(rng: &mut StdRng, n: usize) -> DVector<T> {
    DVector::from_fn(n, |_, _| scalar::<T>(rng, 1.0) + T::of_real(2.0))
}

pub fn max_abs_diff<T: Scalar>(a: &nalgebra::DMatrix<T>, b: &nalgebra::DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((*x - *y).modulus()))
}
