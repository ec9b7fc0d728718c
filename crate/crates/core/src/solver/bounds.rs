//! A priori error bounds, evaluated in log space.
//!
//! With `k = 1 + N(p-1)` coefficient blocks after `p` iterations:
//!
//! * Krylov part: `2 √((1-|ε|^{2k})/(1-|ε|²)) (tα)^p e^{t·max(1,β)} / p! · ‖u_0‖`
//! * truncation, `N = 1`: `e^{t(μ(A_0)+|ε|‖A_1‖)} (|ε| t‖A_1‖)^k / k! · ‖u_0‖`
//! * truncation, `N ≥ 2`: `C_1 Σ_{ℓ=0}^{N-1} C_2^{⌊k/N⌋+ℓ} / (⌊k/N⌋+ℓ-1)!` with
//!   `C_1 = |ε|^{sign(|ε|-1)} e^{t(μ(A_0)+eNa)+C_2-1} ‖u_0‖`, `C_2 = |ε|^N eNta`.
//!
//! The total is the sum of the two parts. Overflow yields `+∞`, never NaN.

use serde::Serialize;

/// Norm data the bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    /// `Σ_{ℓ=0}^N ‖A_ℓ‖`
    pub alpha: f64,
    /// `μ(A_0) + Σ_{ℓ=1}^N ‖A_ℓ‖`
    pub beta: f64,
    /// `μ(A_0)`
    pub mu0: f64,
    /// `max_{1≤j≤N} ‖A_j‖` (0 when `N = 0`)
    pub a: f64,
}

impl BoundInputs {
    /// From `[‖A_0‖, …, ‖A_N‖]` and `μ(A_0)`.
    pub fn from_norms(norms: &[f64], mu0: f64) -> Self {
        let alpha = norms.iter().sum();
        let tail: f64 = norms.iter().skip(1).sum();
        let a = norms.iter().skip(1).copied().fold(0.0, f64::max);
        BoundInputs {
            alpha,
            beta: mu0 + tail,
            mu0,
            a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriBounds {
    pub krylov: f64,
    pub truncation: f64,
    pub total: f64,
}

/// Number of coefficient blocks available after `p` iterations.
pub fn coefficient_count(p: usize, degree: usize) -> usize {
    1 + degree * p.saturating_sub(1)
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `ln Σ_{ℓ<k} x^{2ℓ}` for `x ≥ 0`.
fn ln_geometric(x: f64, k: usize) -> f64 {
    if x == 0.0 || k <= 1 {
        return 0.0;
    }
    let kf = k as f64;
    if x == 1.0 {
        kf.ln()
    } else if x < 1.0 {
        (-(2.0 * kf * x.ln()).exp_m1()).ln() - (1.0 - x * x).ln()
    } else {
        2.0 * kf * x.ln() + (-(-2.0 * kf * x.ln()).exp()).ln_1p() - (x * x - 1.0).ln()
    }
}

fn from_ln(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v.exp()
    }
}

fn ln_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Krylov, truncation and total a priori bounds at `(t, |ε|)` after `p`
/// iterations on a degree-`degree` polynomial.
pub fn apriori_bounds(b: &BoundInputs, t: f64, eps_abs: f64, p: usize, degree: usize, u0_norm: f64) -> AprioriBounds {
    if t.is_nan() || t < 0.0 || !t.is_finite() || !eps_abs.is_finite() || p == 0 {
        return AprioriBounds {
            krylov: f64::INFINITY,
            truncation: f64::INFINITY,
            total: f64::INFINITY,
        };
    }
    let k = coefficient_count(p, degree);
    let ln_u0 = u0_norm.ln();

    let krylov = if t == 0.0 || b.alpha == 0.0 {
        0.0
    } else {
        from_ln(
            std::f64::consts::LN_2
                + 0.5 * ln_geometric(eps_abs, k)
                + p as f64 * (t * b.alpha).ln()
                + t * b.beta.max(1.0)
                - ln_factorial(p)
                + ln_u0,
        )
    };

    let truncation = match degree {
        0 => 0.0,
        1 => {
            let x = eps_abs * t * b.a;
            if x == 0.0 {
                0.0
            } else {
                from_ln(t * (b.mu0 + eps_abs * b.a) + k as f64 * x.ln() - ln_factorial(k) + ln_u0)
            }
        }
        nn => remainder_general(b, t, eps_abs, k, nn, ln_u0),
    };

    AprioriBounds {
        krylov,
        truncation,
        total: krylov + truncation,
    }
}

fn remainder_general(b: &BoundInputs, t: f64, eps_abs: f64, k: usize, nn: usize, ln_u0: f64) -> f64 {
    let e = std::f64::consts::E;
    let nf = nn as f64;
    let c2 = eps_abs.powi(nn as i32) * e * nf * t * b.a;
    if c2 == 0.0 {
        // every surviving term carries a positive power of |ε|·t·a
        return 0.0;
    }
    let sign = if eps_abs > 1.0 {
        1.0
    } else if eps_abs < 1.0 {
        -1.0
    } else {
        0.0
    };
    let ln_c1 = sign * eps_abs.ln() + t * (b.mu0 + e * nf * b.a) + c2 - 1.0 + ln_u0;
    let base = k / nn;
    let terms: Vec<f64> = (0..nn)
        .map(|l| base + l)
        // 1/(-1)! = 0
        .filter(|&q| q >= 1)
        .map(|q| q as f64 * c2.ln() - ln_factorial(q - 1))
        .collect();
    if terms.is_empty() {
        return 0.0;
    }
    from_ln(ln_c1 + ln_sum_exp(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> BoundInputs {
        BoundInputs::from_norms(&[2.0, 0.5, 0.25], -0.3)
    }

    #[test]
    fn from_norms_fields() {
        let b = inputs();
        assert_eq!(b.alpha, 2.75);
        assert_eq!(b.beta, -0.3 + 0.75);
        assert_eq!(b.a, 0.5);
        assert!(b.alpha >= b.a);
        assert!(b.beta <= b.mu0 + b.alpha);
    }

    #[test]
    fn eps_zero_krylov_matches_closed_form() {
        let b = inputs();
        let (t, p) = (0.7, 6);
        let r = apriori_bounds(&b, t, 0.0, p, 2, 1.5);
        let fact: f64 = (1..=p).map(|i| i as f64).product();
        let expect = 2.0 * (t * b.alpha).powi(p as i32) * (t * b.beta.max(1.0)).exp() / fact * 1.5;
        assert!((r.krylov - expect).abs() <= 1e-13 * expect);
        assert_eq!(r.truncation, 0.0);
        assert_eq!(r.total, r.krylov);
    }

    #[test]
    fn unit_eps_uses_the_limit() {
        let b = BoundInputs::from_norms(&[1.0, 1.0], 0.0);
        let p = 5;
        let at_one = apriori_bounds(&b, 0.5, 1.0, p, 1, 1.0).krylov;
        let near = apriori_bounds(&b, 0.5, 1.0 - 1e-9, p, 1, 1.0).krylov;
        assert!((at_one - near).abs() <= 1e-6 * at_one);
        let zero = apriori_bounds(&b, 0.5, 0.0, p, 1, 1.0).krylov;
        // sqrt(k) with k = p for N = 1
        assert!((at_one / zero - (p as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn first_order_truncation_closed_form() {
        let b = BoundInputs::from_norms(&[3.0, 2.0], -1.0);
        let (t, eps, p) = (0.5, 0.3, 4);
        let r = apriori_bounds(&b, t, eps, p, 1, 2.0);
        let x: f64 = eps * t * 2.0;
        let expect = (t * (-1.0 + eps * 2.0)).exp() * x.powi(4) / 24.0 * 2.0;
        assert!((r.truncation - expect).abs() <= 1e-14 * expect);
    }

    #[test]
    fn general_truncation_matches_direct_sum() {
        let b = inputs();
        let (t, eps, p, nn) = (0.8, 0.4_f64, 5, 2);
        let k = coefficient_count(p, nn);
        let e = std::f64::consts::E;
        let c2 = eps.powi(2) * e * 2.0 * t * b.a;
        let c1 = eps.powi(-1) * (t * (b.mu0 + e * 2.0 * b.a) + c2 - 1.0).exp() * 1.0;
        let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
        let expect: f64 = (0..nn)
            .map(|l| {
                let q = k / nn + l;
                c2.powi(q as i32) / fact(q - 1)
            })
            .sum::<f64>()
            * c1;
        let r = apriori_bounds(&b, t, eps, p, nn, 1.0);
        assert!((r.truncation - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn superlinear_decrease_beyond_e_t_alpha() {
        let b = BoundInputs::from_norms(&[4.0, 1.0], -2.0);
        let (t, eps) = (1.0, 0.5);
        let start = (std::f64::consts::E * t * b.alpha).ceil() as usize;
        let mut prev = apriori_bounds(&b, t, eps, start, 1, 1.0).total;
        for p in start + 1..start + 40 {
            let cur = apriori_bounds(&b, t, eps, p, 1, 1.0).total;
            assert!(cur < prev, "p={p}: {cur} !< {prev}");
            prev = cur;
        }
    }

    #[test]
    fn overflow_is_infinite_not_nan() {
        let b = BoundInputs::from_norms(&[1e3, 1e3, 1e3], 1e3);
        let r = apriori_bounds(&b, 100.0, 10.0, 3, 2, 1.0);
        assert!(r.total.is_infinite() && r.total > 0.0);
        assert!(!r.krylov.is_nan() && !r.truncation.is_nan());
        let r = apriori_bounds(&b, -1.0, 0.1, 3, 2, 1.0);
        assert!(r.total.is_infinite());
    }
}
