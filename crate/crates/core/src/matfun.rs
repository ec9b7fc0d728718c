//! Dense matrix exponential and the first two φ-functions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// Pade degree thresholds on the 1-norm (Higham 2005, Table 2.3)
const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// squarings beyond this cannot produce a finite result
const MAX_SQUARINGS: i32 = 1100;

fn norm1<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled<T: Scalar>(a: &DMatrix<T>, s: f64) -> DMatrix<T> {
    a.map(|v| v.scale(s))
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree 3, 5, 7, 9 or 13 chosen from the 1-norm.
pub fn expm<T: Scalar>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !a.is_square() {
        return Err(Error::dims(format!(
            "expm needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("expm input"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let nrm = norm1(a);
    let ident = DMatrix::<T>::identity(n, n);

    for &(m, theta) in &THETA {
        if nrm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(a, &ident, coeffs);
        }
    }

    let s = (nrm / THETA_13).log2().ceil().max(0.0) as i32;
    if s > MAX_SQUARINGS {
        return Err(Error::Overflow(format!("1-norm {nrm:e} needs {s} squarings")));
    }
    let a_s = scaled(a, 2f64.powi(-s));
    let mut x = pade13(&a_s, &ident)?;
    for _ in 0..s {
        x = &x * &x;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow(format!("result not representable (1-norm {nrm:e})")));
    }
    Ok(x)
}

fn solve_pade<T: Scalar>(u: DMatrix<T>, v: DMatrix<T>) -> Result<DMatrix<T>> {
    let num = &v + &u;
    (v - u)
        .lu()
        .solve(&num)
        .ok_or(Error::NonFinite("expm Pade denominator"))
}

fn pade_low<T: Scalar>(a: &DMatrix<T>, ident: &DMatrix<T>, b: &[f64]) -> Result<DMatrix<T>> {
    // powers A^0, A^2, A^4, ... up to the degree
    let a2 = a * a;
    let mut pows = vec![ident.clone()];
    while 2 * pows.len() < b.len() {
        let next = pows.last().expect("nonempty") * &a2;
        pows.push(next);
    }
    let mut u_inner = DMatrix::<T>::zeros(a.nrows(), a.ncols());
    let mut v = DMatrix::<T>::zeros(a.nrows(), a.ncols());
    for (k, p) in pows.iter().enumerate() {
        v += scaled(p, b[2 * k]);
        if 2 * k + 1 < b.len() {
            u_inner += scaled(p, b[2 * k + 1]);
        }
    }
    solve_pade(a * u_inner, v)
}

fn pade13<T: Scalar>(a: &DMatrix<T>, ident: &DMatrix<T>) -> Result<DMatrix<T>> {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_hi = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    let u_inner = &a6 * u_hi + scaled(&a6, b[7]) + scaled(&a4, b[5]) + scaled(&a2, b[3]) + scaled(ident, b[1]);
    let u = a * u_inner;
    let v_hi = scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]);
    let v = &a6 * v_hi + scaled(&a6, b[6]) + scaled(&a4, b[4]) + scaled(&a2, b[2]) + scaled(ident, b[0]);
    solve_pade(u, v)
}

/// `φ₁(tH)e₁` and `φ₂(tH)e₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiPair<T> {
    pub phi1_col: DVector<T>,
    pub phi2_col: DVector<T>,
}

// substeps of the Taylor action are kept at 1-norm <= TAYLOR_STEP_NORM;
// beyond TAYLOR_MAX_STEPS the dense exponential is cheaper
const TAYLOR_STEP_NORM: f64 = 2.0;
const TAYLOR_MAX_STEPS: usize = 64;
const TAYLOR_MAX_TERMS: usize = 60;

/// `exp(A) v` without forming `exp(A)`: shift by the mean eigenvalue
/// `tr(A)/n`, split into `s` substeps of norm at most 2 and sum each
/// Taylor series until two consecutive terms fall below unit round-off.
/// Falls back to [`expm`] when `s` would be large.
pub fn expm_action<T: Scalar>(a: &DMatrix<T>, v: &DVector<T>) -> Result<DVector<T>> {
    let n = a.nrows();
    if !a.is_square() || v.len() != n {
        return Err(Error::dims(format!(
            "expm_action needs a square matrix and matching vector, got {}x{} and {}",
            a.nrows(),
            a.ncols(),
            v.len()
        )));
    }
    if n == 0 {
        return Ok(v.clone());
    }
    if a.iter().chain(v.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("expm_action input"));
    }
    let mu = a.trace() * T::of_real(1.0 / n as f64);
    let mut b = a.clone();
    for i in 0..n {
        b[(i, i)] -= mu;
    }
    let nb = norm1(&b);
    let steps = (nb / TAYLOR_STEP_NORM).ceil().max(1.0);
    if steps > TAYLOR_MAX_STEPS as f64 {
        return Ok(expm(a)? * v);
    }
    let steps = steps as usize;
    b.scale_mut(1.0 / steps as f64);
    let growth = (mu * T::of_real(1.0 / steps as f64)).exp();
    // rows past the last nonzero of each column are skipped (Hessenberg input)
    let col_len: Vec<usize> = b
        .column_iter()
        .map(|c| c.iter().rposition(|x| *x != T::zero()).map_or(0, |i| i + 1))
        .collect();
    let tol = f64::EPSILON / 2.0;
    let mut f = v.clone();
    let mut term = DVector::<T>::zeros(n);
    let mut next = DVector::<T>::zeros(n);
    for _ in 0..steps {
        term.copy_from(&f);
        let mut prev_small = false;
        for k in 1..=TAYLOR_MAX_TERMS {
            next.fill(T::zero());
            let out = next.as_mut_slice();
            for (j, &len) in col_len.iter().enumerate() {
                let x = term[j].scale(1.0 / k as f64);
                for (o, bij) in out[..len].iter_mut().zip(&b.as_slice()[j * n..j * n + len]) {
                    *o += *bij * x;
                }
            }
            std::mem::swap(&mut term, &mut next);
            f += &term;
            let small = term.norm() <= tol * f.norm();
            if small && prev_small {
                break;
            }
            prev_small = small;
        }
        f *= growth;
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("expm_action result"));
    }
    Ok(f)
}

/// Computes `φ₁(tH)e₁` and `φ₂(tH)e₁` from one exponential of the
/// augmented matrix
///
/// ```text
/// [ tH  e₁  e₁ ]
/// [ 0   0   0  ]
/// [ 0   1   0  ]
/// ```
///
/// whose top block row is `[exp(tH) | φ₁e₁ + φ₂e₁ | φ₁e₁]`.
pub fn phi_columns<T: Scalar>(h: &DMatrix<T>, t: f64) -> Result<PhiPair<T>> {
    if !h.is_square() {
        return Err(Error::dims(format!(
            "phi_columns needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let p = h.nrows();
    let mut aug = DMatrix::<T>::zeros(p + 2, p + 2);
    aug.view_mut((0, 0), (p, p)).copy_from(&scaled(h, t));
    if p > 0 {
        aug[(0, p)] = T::one();
        aug[(0, p + 1)] = T::one();
    }
    aug[(p + 1, p)] = T::one();
    let e = expm(&aug)?;
    let phi1_col: DVector<T> = e.view((0, p + 1), (p, 1)).column(0).into_owned();
    let phi2_col = e.view((0, p), (p, 1)).column(0).into_owned() - &phi1_col;
    Ok(PhiPair { phi1_col, phi2_col })
}
