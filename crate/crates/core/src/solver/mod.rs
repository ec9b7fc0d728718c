//! One Arnoldi run, many `(t, ε)` evaluations.
//!
//! [`build`] runs the iteration on the (optionally scaled) polynomial. The
//! resulting [`ParameterizedSolution`] is immutable; evaluating it at a new
//! `(t, ε)` costs one small `p × p` exponential plus a pass over the basis.

mod adaptive;
mod bounds;
mod estimate;

use nalgebra::DVector;

use crate::arnoldi::{arnoldi_step, KrylovDecomposition, StepOutcome};
use crate::error::{Error, Result};
use crate::linalg::log_norm;
use crate::matfun::expm_action;
use crate::scalar::Scalar;
use crate::toeplitz::{apply_scaling, gamma_from_norms, MatrixPolynomial, ScalingTransform};

pub use adaptive::{solve_adaptive, AdaptiveOptions, AdaptiveOutcome, DEFAULT_CHECK_INTERVAL};
pub use bounds::{apriori_bounds, coefficient_count, AprioriBounds, BoundInputs};
pub use estimate::ErrorReport;

/// Tolerance for the norm estimates feeding the bounds.
pub const BOUND_NORM_TOL: f64 = 1e-6;

/// How the polynomial is rescaled before iterating.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Scaling {
    /// `γ = 1`.
    None,
    /// `γ = max_{ℓ≥1} ‖A_ℓ‖^{1/ℓ}`.
    #[default]
    Heuristic,
    Fixed(f64),
}

/// Output of the infinite Arnoldi method together with everything needed
/// to evaluate `ũ(t, ε)`, its coefficients and error bounds.
///
/// Internally everything lives in the scaled frame `Â_ℓ = γ^{-ℓ}A_ℓ`,
/// `ε̂ = γε`; the public methods take and return unscaled quantities.
#[derive(Debug, Clone)]
pub struct ParameterizedSolution<T> {
    poly: MatrixPolynomial<T>,
    scaling: ScalingTransform,
    krylov: KrylovDecomposition<T>,
    bounds: BoundInputs,
}

/// Runs `p` Arnoldi iterations (fewer on breakdown) and packages the result.
pub fn build<T: Scalar>(
    poly: &MatrixPolynomial<T>,
    u0: &DVector<T>,
    p: usize,
    scaling: Scaling,
) -> Result<ParameterizedSolution<T>> {
    if p == 0 {
        return Err(Error::InvalidArgument("need at least one Arnoldi iteration".into()));
    }
    let mut sol = ParameterizedSolution::start(poly, u0, scaling)?;
    sol.extend(p)?;
    Ok(sol)
}

impl<T: Scalar> ParameterizedSolution<T> {
    /// Zero iterations: validates inputs, picks `γ`, estimates the norms.
    pub fn start(poly: &MatrixPolynomial<T>, u0: &DVector<T>, scaling: Scaling) -> Result<Self> {
        let norms = poly.coefficient_norms(BOUND_NORM_TOL)?;
        let gamma = match scaling {
            Scaling::None => 1.0,
            Scaling::Heuristic => gamma_from_norms(&norms),
            Scaling::Fixed(g) => g,
        };
        let s = ScalingTransform::new(gamma)?;
        let scaled = if gamma == 1.0 {
            poly.clone()
        } else {
            apply_scaling(poly, s)
        };
        let krylov = KrylovDecomposition::start(&scaled, u0)?;
        let scaled_norms: Vec<f64> = norms
            .iter()
            .enumerate()
            .map(|(l, v)| v * s.coefficient_factor(l))
            .collect();
        let mu0 = log_norm(poly.coeff(0), BOUND_NORM_TOL)?;
        Ok(ParameterizedSolution {
            poly: scaled,
            scaling: s,
            krylov,
            bounds: BoundInputs::from_norms(&scaled_norms, mu0),
        })
    }

    /// Runs up to `steps` more iterations; stops early on breakdown.
    pub fn extend(&mut self, steps: usize) -> Result<StepOutcome> {
        for _ in 0..steps {
            if arnoldi_step(&self.poly, &mut self.krylov)? == StepOutcome::Breakdown {
                return Ok(StepOutcome::Breakdown);
            }
        }
        Ok(if self.krylov.is_breakdown() {
            StepOutcome::Breakdown
        } else {
            StepOutcome::Extended
        })
    }

    /// Completed iterations.
    pub fn p(&self) -> usize {
        self.krylov.steps()
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// `1 + N(p-1)`
    pub fn k_max(&self) -> usize {
        coefficient_count(self.p(), self.degree())
    }

    pub fn gamma(&self) -> f64 {
        self.scaling.gamma()
    }

    pub fn scaling(&self) -> ScalingTransform {
        self.scaling
    }

    /// `‖u_0‖`
    pub fn u0_norm(&self) -> f64 {
        self.krylov.beta()
    }

    pub fn is_breakdown(&self) -> bool {
        self.krylov.is_breakdown()
    }

    pub fn decomposition(&self) -> &KrylovDecomposition<T> {
        &self.krylov
    }

    /// The polynomial the iteration actually ran on, `Σ ε̂^ℓ γ^{-ℓ} A_ℓ`.
    pub fn scaled_polynomial(&self) -> &MatrixPolynomial<T> {
        &self.poly
    }

    /// Norm data in the scaled frame.
    pub fn bound_inputs(&self) -> &BoundInputs {
        &self.bounds
    }

    /// The solution truncated to its first `p` iterations.
    pub fn view(&self, p: usize) -> Result<SolutionView<'_, T>> {
        if p == 0 || p > self.p() {
            return Err(Error::InvalidArgument(format!(
                "view needs 1 <= p <= {}, got {p}",
                self.p()
            )));
        }
        Ok(SolutionView { sol: self, p })
    }

    fn full(&self) -> SolutionView<'_, T> {
        SolutionView {
            sol: self,
            p: self.p(),
        }
    }

    /// `c̃_0(t), …, c̃_{k-1}(t)`.
    pub fn coefficients(&self, t: f64, k: usize) -> Result<Vec<DVector<T>>> {
        self.full().coefficients(t, k)
    }

    /// `ũ(t, ε) = Σ_{ℓ<k_max} ε^ℓ c̃_ℓ(t)`.
    pub fn evaluate(&self, t: f64, eps: T) -> Result<DVector<T>> {
        self.full().evaluate(t, eps)
    }

    /// Same, keeping only the first `k` terms.
    pub fn evaluate_truncated(&self, t: f64, eps: T, k: usize) -> Result<DVector<T>> {
        self.full().evaluate_truncated(t, eps, k)
    }

    pub fn error_report(&self, t: f64, eps: T) -> Result<ErrorReport<T>> {
        self.full().error_report(t, eps)
    }
}

/// Borrowed view of the first `p` iterations of a solution. All
/// evaluation routines live here so a single long run can be queried at
/// every intermediate `p`.
#[derive(Debug, Clone, Copy)]
pub struct SolutionView<'a, T> {
    sol: &'a ParameterizedSolution<T>,
    p: usize,
}

impl<'a, T: Scalar> SolutionView<'a, T> {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k_max(&self) -> usize {
        coefficient_count(self.p, self.sol.degree())
    }

    pub fn solution(&self) -> &'a ParameterizedSolution<T> {
        self.sol
    }

    /// Whether this view ends at an exact invariant subspace.
    pub fn is_breakdown(&self) -> bool {
        self.sol.is_breakdown() && self.p == self.sol.p()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.k_max() {
            return Err(Error::InvalidArgument(format!(
                "coefficient count must be in 1..={}, got {k}",
                self.k_max()
            )));
        }
        Ok(())
    }

    fn check_point(t: f64, eps: T) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::NonFinite("time"));
        }
        if !eps.is_finite() {
            return Err(Error::NonFinite("parameter"));
        }
        Ok(())
    }

    /// `Q_p exp(tH_p) e_1 ‖u_0‖` in the scaled frame, first `k` blocks.
    fn scaled_coefficient_vector(&self, t: f64, k: usize) -> Result<Vec<T>> {
        let kry = &self.sol.krylov;
        let n = self.sol.dim();
        let h = kry.hessenberg_square(self.p) * T::of_real(t);
        let mut e1 = DVector::zeros(self.p);
        e1[0] = T::one();
        let e = expm_action(&h, &e1)?;
        let beta = T::of_real(kry.beta());
        let len = n * k;
        let mut c = vec![T::zero(); len];
        for j in 0..self.p {
            let w = e[j] * beta;
            let q = kry.basis_column(j);
            let m = q.len().min(len);
            for (ci, qi) in c[..m].iter_mut().zip(&q[..m]) {
                *ci += w * *qi;
            }
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("coefficient vector"));
        }
        Ok(c)
    }

    pub fn coefficients(&self, t: f64, k: usize) -> Result<Vec<DVector<T>>> {
        self.check_k(k)?;
        Self::check_point(t, T::zero())?;
        let n = self.sol.dim();
        let c = self.scaled_coefficient_vector(t, k)?;
        Ok(c
            .chunks(n)
            .enumerate()
            .map(|(l, blk)| {
                // c_ℓ = γ^ℓ ĉ_ℓ
                let f = T::of_real(self.sol.scaling.gamma().powi(l as i32));
                DVector::from_iterator(n, blk.iter().map(|v| *v * f))
            })
            .collect())
    }

    pub fn evaluate(&self, t: f64, eps: T) -> Result<DVector<T>> {
        self.evaluate_truncated(t, eps, self.k_max())
    }

    pub fn evaluate_truncated(&self, t: f64, eps: T, k: usize) -> Result<DVector<T>> {
        self.check_k(k)?;
        Self::check_point(t, eps)?;
        let n = self.sol.dim();
        let c = self.scaled_coefficient_vector(t, k)?;
        let eps_hat = eps * T::of_real(self.sol.scaling.gamma());
        let mut acc = DVector::<T>::zeros(n);
        for blk in c.chunks(n).rev() {
            for (a, b) in acc.iter_mut().zip(blk) {
                *a = *a * eps_hat + *b;
            }
        }
        Ok(acc)
    }
}
