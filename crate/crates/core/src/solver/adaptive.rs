//! Iterate until the estimated error at every target is below a tolerance.

use nalgebra::DVector;

use crate::arnoldi::StepOutcome;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::toeplitz::MatrixPolynomial;

use super::{ErrorReport, ParameterizedSolution, Scaling};

pub const DEFAULT_CHECK_INTERVAL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub scaling: Scaling,
    /// Arnoldi steps between estimate evaluations.
    pub check_interval: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            scaling: Scaling::Heuristic,
            check_interval: DEFAULT_CHECK_INTERVAL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdaptiveOutcome<T> {
    pub solution: ParameterizedSolution<T>,
    /// One report per target at the final `p`.
    pub reports: Vec<ErrorReport<T>>,
    /// False when `p_max` was reached with some estimate above `tol`.
    pub converged: bool,
}

/// Runs Arnoldi until `max total_estimate ≤ tol` over `targets`, checking
/// every `check_interval` steps, or until `p_max` iterations.
pub fn solve_adaptive<T: Scalar>(
    poly: &MatrixPolynomial<T>,
    u0: &DVector<T>,
    targets: &[(f64, T)],
    tol: f64,
    p_max: usize,
    opts: AdaptiveOptions,
) -> Result<AdaptiveOutcome<T>> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("no target points".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if p_max == 0 || opts.check_interval == 0 {
        return Err(Error::InvalidArgument("p_max and check_interval must be positive".into()));
    }
    let mut solution = ParameterizedSolution::start(poly, u0, opts.scaling)?;
    loop {
        let steps = opts.check_interval.min(p_max - solution.p());
        let outcome = solution.extend(steps)?;
        let reports = targets
            .iter()
            .map(|&(t, eps)| solution.error_report(t, eps))
            .collect::<Result<Vec<_>>>()?;
        let worst = reports.iter().map(|r| r.total_estimate).fold(0.0, f64::max);
        let converged = worst <= tol || outcome == StepOutcome::Breakdown;
        if converged || solution.p() >= p_max {
            return Ok(AdaptiveOutcome {
                solution,
                reports,
                converged,
            });
        }
    }
}
