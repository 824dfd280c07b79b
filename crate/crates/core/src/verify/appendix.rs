//! Closed forms for the derivatives of `p(r) = (μ² + r²)^α`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Check, Comparison, Outcome, Tier, VerificationReport};
use crate::error::{Error, Result};

/// `a_{k,j}` for `k = 0..=k_max`, `j = 0..=k`, with
/// `p^{(2k)}(r) = Σ_j a_{k,j} μ^{2j} (μ² + r²)^{α-k-j}`.
pub fn lemma_a1_coefficients(alpha: f64, k_max: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![1.0]];
    for k in 0..k_max {
        let kf = k as f64;
        let prev = &a[k];
        let next: Vec<f64> = (0..=k + 1)
            .map(|j| {
                let jf = j as f64;
                let keep = prev.get(j).map_or(0.0, |&c| 2.0 * c * (alpha - kf - jf) * (2.0 * alpha - 2.0 * kf - 2.0 * jf - 1.0));
                let shift = if j == 0 {
                    0.0
                } else {
                    -4.0 * prev[j - 1] * (alpha - kf - jf) * (alpha - kf - jf + 1.0)
                };
                keep + shift
            })
            .collect();
        a.push(next);
    }
    a
}

/// `p^{(ℓ)}(r)` from the coefficient table.
pub fn derivative_from_coefficients(a: &[Vec<f64>], alpha: f64, mu: f64, l: usize, r: f64) -> f64 {
    let k = l / 2;
    let kf = k as f64;
    let m2 = mu * mu;
    let w = m2 + r * r;
    let row = &a[k];
    if l % 2 == 0 {
        row.iter()
            .enumerate()
            .map(|(j, c)| c * m2.powi(j as i32) * w.powf(alpha - kf - j as f64))
            .sum()
    } else {
        2.0 * r
            * row
                .iter()
                .enumerate()
                .map(|(j, c)| (alpha - kf - j as f64) * c * m2.powi(j as i32) * w.powf(alpha - kf - j as f64 - 1.0))
                .sum::<f64>()
    }
}

/// Constant `C` with `|p^{(ℓ)}(r)| <= C (μ² + r²)^{α-ℓ/2}` read off the
/// coefficients.
pub fn bound_constant(a: &[Vec<f64>], alpha: f64, l: usize) -> f64 {
    let k = l / 2;
    let row = &a[k];
    if l % 2 == 0 {
        row.iter().map(|c| c.abs()).sum()
    } else {
        2.0 * row
            .iter()
            .enumerate()
            .map(|(j, c)| ((alpha - k as f64 - j as f64) * c).abs())
            .sum::<f64>()
    }
}

fn factorial(l: usize) -> f64 {
    (1..=l).map(|i| i as f64).product()
}

/// `p^{(ℓ)}(r)` by the trapezoid rule for the Cauchy integral on a circle of
/// radius `h` around `r`, with `h` small enough that `μ² + z²` stays in the
/// right half plane.
pub fn cauchy_derivative(alpha: f64, mu: f64, l: usize, r: f64, points: usize) -> f64 {
    let h = 0.5 * ((mu * mu + 2.0 * r * r).sqrt() - r);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..points {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / points as f64;
        let z = Complex64::new(r, 0.0) + Complex64::from_polar(h, theta);
        let p = (mu * mu + z * z).powf(alpha);
        acc += p * Complex64::from_polar(1.0, -(l as f64) * theta);
    }
    (acc * factorial(l) / (points as f64 * h.powi(l as i32))).re
}

/// Five-point central difference for `ℓ ∈ {1, 2}` with one Richardson step.
pub fn richardson_derivative(alpha: f64, mu: f64, l: usize, r: f64, h: f64) -> f64 {
    let p = |x: f64| (mu * mu + x * x).powf(alpha);
    let d = |h: f64| match l {
        1 => (-p(r + 2.0 * h) + 8.0 * p(r + h) - 8.0 * p(r - h) + p(r - 2.0 * h)) / (12.0 * h),
        _ => (-p(r + 2.0 * h) + 16.0 * p(r + h) - 30.0 * p(r) + 16.0 * p(r - h) - p(r - 2.0 * h)) / (12.0 * h * h),
    };
    (16.0 * d(h / 2.0) - d(h)) / 15.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppendixSample {
    pub mu: f64,
    pub alpha: f64,
    /// Per order `ℓ`: largest gap between the closed form and the contour
    /// oracle over the sample points, relative to
    /// `max(|p^{(ℓ)}(r)|, (μ² + r²)^{α-ℓ/2})`.
    pub oracle_error: Vec<f64>,
    /// Per order `ℓ <= 2`: same against the real-axis stencil.
    pub stencil_error: Vec<f64>,
    /// Per order: `max_r |p^{(ℓ)}(r)| / (μ² + r²)^{α-ℓ/2}` over `r ∈ [0, 10]`.
    pub bound_ratio: Vec<f64>,
    pub bound_constant: Vec<f64>,
}

pub fn appendix_sample(mu: f64, alpha: f64, k_max: usize, r_samples: &[f64]) -> Result<AppendixSample> {
    if !(mu > 0.0) || k_max > 6 {
        return Err(Error::InvalidParameter(format!("need μ > 0 and k_max <= 6, got {mu}, {k_max}")));
    }
    let a = lemma_a1_coefficients(alpha, k_max);
    let orders = 2 * k_max + 1;
    let mut oracle_error = Vec::with_capacity(orders + 1);
    let mut stencil_error = Vec::new();
    let mut bound_ratio = Vec::with_capacity(orders + 1);
    let mut constants = Vec::with_capacity(orders + 1);
    for l in 0..=orders {
        let mut worst: f64 = 0.0;
        let mut worst_stencil: f64 = 0.0;
        for &r in r_samples {
            let exact = derivative_from_coefficients(&a, alpha, mu, l, r);
            // Relative to the natural size, which stays meaningful at zeros of p^{(ℓ)}.
            let scale = exact.abs().max((mu * mu + r * r).powf(alpha - l as f64 / 2.0));
            worst = worst.max((cauchy_derivative(alpha, mu, l, r, 64) - exact).abs() / scale);
            if (1..=2).contains(&l) {
                worst_stencil = worst_stencil.max((richardson_derivative(alpha, mu, l, r, 1e-2) - exact).abs() / scale);
            }
        }
        oracle_error.push(worst);
        if (1..=2).contains(&l) {
            stencil_error.push(worst_stencil);
        }
        let ratio = (0..=1000)
            .map(|i| {
                let r = i as f64 * 0.01;
                derivative_from_coefficients(&a, alpha, mu, l, r).abs() / (mu * mu + r * r).powf(alpha - l as f64 / 2.0)
            })
            .fold(0.0, f64::max);
        bound_ratio.push(ratio);
        constants.push(bound_constant(&a, alpha, l));
    }
    Ok(AppendixSample {
        mu,
        alpha,
        oracle_error,
        stencil_error,
        bound_ratio,
        bound_constant: constants,
    })
}

const ORACLE_TOL: f64 = 1e-6;

fn sample_checks(out: &mut Outcome, s: &AppendixSample) {
    let tag = |l: usize| format!("mu={} alpha={} l={l}", s.mu, s.alpha);
    for (l, e) in s.oracle_error.iter().enumerate() {
        out.push(Check::new("contour oracle relative error", tag(l), *e, 0.0, ORACLE_TOL, Comparison::AtMost));
    }
    for (i, e) in s.stencil_error.iter().enumerate() {
        out.push(Check::new("real stencil relative error", tag(i + 1), *e, 0.0, ORACLE_TOL, Comparison::AtMost));
    }
    for (l, (ratio, c)) in s.bound_ratio.iter().zip(&s.bound_constant).enumerate() {
        out.push(Check::new("derivative bound ratio", tag(l), *ratio, *c, 1e-12 * c, Comparison::AtMost));
    }
}

/// Single-parameter report for `(μ, α)`.
pub fn appendix_a_derivatives(mu: f64, alpha: f64, k_max: usize, r_samples: &[f64]) -> Result<VerificationReport> {
    let s = appendix_sample(mu, alpha, k_max, r_samples)?;
    let mut out = Outcome::default();
    sample_checks(&mut out, &s);
    let pass = out.checks.iter().all(|c| c.pass);
    let mut parameters = BTreeMap::new();
    parameters.insert("mu".into(), mu.to_string());
    parameters.insert("alpha".into(), alpha.to_string());
    parameters.insert("k_max".into(), k_max.to_string());
    Ok(VerificationReport {
        lemma_id: "A.1".into(),
        tier: Tier::Small,
        seed: 0,
        parameters,
        checks: out.checks,
        notes: Vec::new(),
        pass,
        wall_time_s: 0.0,
    })
}

pub(crate) const R_SAMPLES: [f64; 4] = [0.25, 1.0, 2.5, 6.0];

pub(super) fn a_1(tier: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut cases = vec![(1.0, 0.5), (2.0, -1.5)];
    if tier == Tier::Full {
        cases.extend([(0.5, 2.25), (3.0, -0.75)]);
    }
    out.param("k_max", 3);
    out.param("cases", format!("{cases:?}"));
    for (mu, alpha) in cases {
        sample_checks(&mut out, &appendix_sample(mu, alpha, 3, &R_SAMPLES)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases() {
        let a = lemma_a1_coefficients(0.7, 2);
        assert_eq!(a[0], vec![1.0]);
        let (mu, r, al) = (1.3, 0.8, 0.7);
        let w: f64 = mu * mu + r * r;
        assert!((derivative_from_coefficients(&a, al, mu, 0, r) - w.powf(al)).abs() < 1e-15);
        let d1 = 2.0 * al * r * w.powf(al - 1.0);
        assert!((derivative_from_coefficients(&a, al, mu, 1, r) - d1).abs() < 1e-15);
        // Second derivative expanded by hand.
        assert!((a[1][0] - 2.0 * al * (2.0 * al - 1.0)).abs() < 1e-15);
        assert!((a[1][1] + 4.0 * al * (al - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn contour_oracle_on_known_case() {
        let a = lemma_a1_coefficients(-1.5, 2);
        let exact = derivative_from_coefficients(&a, -1.5, 2.0, 4, 1.0);
        let oracle = cauchy_derivative(-1.5, 2.0, 4, 1.0, 64);
        assert!(((oracle - exact) / exact).abs() < 1e-9, "{oracle} {exact}");
    }

    #[test]
    fn polynomial_case_terminates() {
        // α = 2: p is a polynomial of degree 4, so p^{(5)} = 0.
        let a = lemma_a1_coefficients(2.0, 3);
        for r in [0.0, 0.7, 3.0] {
            assert_eq!(derivative_from_coefficients(&a, 2.0, 1.1, 5, r), 0.0);
            let d4 = derivative_from_coefficients(&a, 2.0, 1.1, 4, r);
            assert!((d4 - 24.0).abs() < 1e-12, "{d4}");
        }
    }

    #[test]
    fn report_passes() {
        let r = appendix_a_derivatives(2.0, -1.5, 3, &R_SAMPLES).unwrap();
        assert!(r.pass, "{:?}", r.first_failure());
        assert!(appendix_a_derivatives(0.0, 1.0, 3, &R_SAMPLES).is_err());
    }
}
