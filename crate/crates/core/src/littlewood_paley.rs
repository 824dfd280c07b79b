//! Smooth dyadic partition of unity in the `ℓ1` frequency norm, the block
//! operators `Δ_j`, and the weights `2^{s|∇|}` and `⟨∇⟩^σ`.
//!
//! The inhomogeneous decomposition uses `ψ` for `j = 0` and
//! `φ_j = ψ(2^{-j}·) - ψ(2^{1-j}·)` for `j >= 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{bracket, l1_norm, GridSpec, Spectrum};

/// Largest exponent for which `2^x` stays comfortably finite.
const MAX_LOG2_WEIGHT: f64 = 1000.0;

fn eta(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
fn step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = eta(t);
        a / (a + eta(1.0 - t))
    }
}

/// Radial cutoff `ψ`: equal to 1 for `r <= inner`, 0 for `r >= outer`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpProfile {
    inner: f64,
    outer: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self::STANDARD
    }
}

impl BumpProfile {
    /// `ψ = 1` on `|ξ| <= 1`, vanishing for `|ξ| >= 5/4`.
    pub const STANDARD: BumpProfile = BumpProfile {
        inner: 1.0,
        outer: 1.25,
    };

    /// `outer <= 2 inner` keeps at most two blocks alive at any frequency.
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer <= 2.0 * inner) {
            return Err(Error::InvalidParameter(format!(
                "bump radii must satisfy 0 < inner < outer <= 2 inner, got ({inner}, {outer})"
            )));
        }
        Ok(Self { inner, outer })
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn psi(&self, r: f64) -> f64 {
        step((self.outer - r) / (self.outer - self.inner))
    }

    /// Homogeneous piece `φ_j(r) = ψ(2^{-j} r) - ψ(2^{1-j} r)`, any integer `j`.
    pub fn phi(&self, j: i32, r: f64) -> f64 {
        let a = r * 2f64.powi(-j);
        self.psi(a) - self.psi(2.0 * a)
    }

    /// Inhomogeneous block weight: `ψ` for `j = 0`, `φ_j` otherwise.
    pub fn block_weight(&self, j: usize, r: f64) -> f64 {
        if j == 0 {
            self.psi(r)
        } else {
            self.phi(j as i32, r)
        }
    }

    /// Open `ℓ1` shell containing the support of the inhomogeneous block `j`.
    pub fn block_support(&self, j: usize) -> (f64, f64) {
        if j == 0 {
            (0.0, self.outer)
        } else {
            let scale = 2f64.powi(j as i32);
            (self.inner * scale / 2.0, self.outer * scale)
        }
    }
}

/// Smallest `J` with `2^J ψ`-radius covering every lattice frequency, so
/// that blocks `0..=J` sum to the identity on the grid.
pub fn max_block(grid: &GridSpec, profile: &BumpProfile) -> usize {
    let top = grid.max_l1_frequency() / profile.inner();
    let mut j = 0;
    while 2f64.powi(j as i32) < top {
        j += 1;
    }
    j
}

/// `Δ_j F`.
pub fn block(f: &Spectrum, j: usize, profile: &BumpProfile) -> Spectrum {
    f.multiply(|xi| profile.block_weight(j, l1_norm(xi)))
}

/// Homogeneous block `Δ̇_j F` for any integer `j`.
pub fn homogeneous_block(f: &Spectrum, j: i32, profile: &BumpProfile) -> Spectrum {
    f.multiply(|xi| profile.phi(j, l1_norm(xi)))
}

/// All inhomogeneous blocks `j = 0..=J`.
pub fn blocks(f: &Spectrum, profile: &BumpProfile) -> Vec<Spectrum> {
    (0..=max_block(f.grid(), profile))
        .map(|j| block(f, j, profile))
        .collect()
}

/// Multiplier `2^{s|ξ|}`.
pub fn smooth(f: &Spectrum, s: f64) -> Result<Spectrum> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!("smoothing index {s}")));
    }
    let worst = s * f.grid().max_l1_frequency();
    if worst > MAX_LOG2_WEIGHT {
        return Err(Error::Overflow(format!(
            "2^(s|ξ|) reaches 2^{worst:.0} on this grid"
        )));
    }
    Ok(smooth_unchecked(f, s))
}

pub(crate) fn exp_weight(s: f64, xi: &[f64]) -> f64 {
    (s * l1_norm(xi)).exp2()
}

pub(crate) fn smooth_unchecked(f: &Spectrum, s: f64) -> Spectrum {
    if s == 0.0 {
        return f.clone();
    }
    f.multiply(|xi| exp_weight(s, xi))
}

/// Multiplier `⟨ξ⟩^σ`.
pub fn bracket_op(f: &Spectrum, sigma: f64) -> Spectrum {
    if sigma == 0.0 {
        return f.clone();
    }
    f.multiply(|xi| bracket(xi).powf(sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GridSpec, Spectrum};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn profile_shape() {
        let p = BumpProfile::default();
        assert_eq!(p.psi(0.0), 1.0);
        assert_eq!(p.psi(1.0), 1.0);
        assert_eq!(p.psi(1.25), 0.0);
        assert!(p.psi(1.1) > 0.0 && p.psi(1.1) < 1.0);
        assert_eq!(p.phi(0, 1.0), 1.0);
        assert!(BumpProfile::new(1.0, 2.5).is_err());
    }

    #[test]
    fn frequency_three_lives_in_block_two_only() {
        let p = BumpProfile::default();
        let live: Vec<usize> = (0..6).filter(|&j| p.block_weight(j, 3.0) != 0.0).collect();
        assert_eq!(live, vec![2]);
        assert_eq!(p.block_weight(2, 3.0), 1.0);
    }

    #[test]
    fn support_shells() {
        let p = BumpProfile::default();
        for j in 1..8 {
            let (lo, hi) = p.block_support(j);
            assert_eq!(p.block_weight(j, lo), 0.0);
            assert_eq!(p.block_weight(j, hi), 0.0);
            assert!(p.block_weight(j, 0.5 * (lo + hi)) > 0.0);
        }
    }

    #[test]
    fn max_block_covers_lattice() {
        let p = BumpProfile::default();
        let g = GridSpec::new(3, 16, 2.0 * PI).unwrap();
        let j = max_block(&g, &p);
        assert!(2f64.powi(j as i32) >= g.max_l1_frequency());
        assert!(2f64.powi(j as i32 - 1) < g.max_l1_frequency());
    }

    #[test]
    fn smoothing_overflow_is_reported() {
        let g = GridSpec::new(1, 1024, 1.0).unwrap();
        let s = Spectrum::zeros(g);
        assert!(smooth(&s, 1.0).is_err());
        assert!(smooth(&s, -1.0).is_ok());
    }

    #[test]
    fn blocks_telescope_to_identity() {
        let p = BumpProfile::default();
        let g = GridSpec::new(2, 32, 2.0 * PI).unwrap();
        let f = Spectrum::from_fn(g, |xi| Complex64::new(xi[0].cos(), xi[1] * 0.1));
        let mut sum = Spectrum::zeros(g);
        for b in blocks(&f, &p) {
            sum = sum.add(&b).unwrap();
        }
        let err = sum.sub(&f).unwrap().l2_sum() / f.l2_sum();
        assert!(err < 1e-14, "{err}");
    }

    proptest! {
        #[test]
        fn partition_of_unity(r in 0.0f64..5000.0) {
            let p = BumpProfile::default();
            let weights: Vec<f64> = (0..=14).map(|j| p.block_weight(j, r)).collect();
            let total: f64 = weights.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-14);
            prop_assert!(weights.iter().all(|w| (0.0..=1.0).contains(w)));
            prop_assert!(weights.iter().filter(|w| **w != 0.0).count() <= 2);
        }

        #[test]
        fn homogeneous_pieces_sum_to_one(r in 1e-3f64..1e3) {
            let p = BumpProfile::default();
            let total: f64 = (-12..=12).map(|j| p.phi(j, r)).sum();
            prop_assert!((total - 1.0).abs() < 1e-14);
        }
    }
}
