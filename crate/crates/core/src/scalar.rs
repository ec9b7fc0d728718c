//! Scalar field abstraction over `f64` and `Complex64`.

use std::fmt;

use nalgebra::ComplexField;
use num_complex::Complex64;

/// Real or complex double precision scalar.
///
/// Everything numeric in the crate is generic over this trait; the dense
/// kernels come from `nalgebra`, hence the `ComplexField` bound.
pub trait Scalar:
    ComplexField<RealField = f64> + Copy + Send + Sync + fmt::Debug + fmt::Display + 'static
{
    const IS_COMPLEX: bool;

    fn of_real(x: f64) -> Self {
        Self::from_real(x)
    }

    /// Builds a scalar from real and imaginary parts. Returns `None` for a
    /// nonzero imaginary part when `Self` is real.
    fn from_parts(re: f64, im: f64) -> Option<Self>;

    fn to_complex(self) -> Complex64;

    /// `conj(self) * other`
    #[inline]
    fn conj_mul(self, other: Self) -> Self {
        self.conjugate() * other
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    #[inline]
    fn conj_mul(self, other: Self) -> Self {
        self * other
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }

    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Euclidean norm of a slice.
pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    // scaled accumulation avoids overflow for the large entries the
    // bound formulas occasionally produce
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.modulus()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = x
        .iter()
        .map(|v| {
            let r = v.modulus() / scale;
            r * r
        })
        .sum();
    scale * sum.sqrt()
}

/// `x^H y`
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (a, b)| acc + a.conj_mul(*b))
}

/// `y += alpha * x` over the common prefix.
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}
