//! Numerical probes of scaling and embedding inequalities.
//!
//! Scaling uses companion grids: `f(λ·)` on `[0, L)^d` has the same DFT
//! coefficients as `f` on `[0, L/λ)^d`, so the rescaled data is exact.

use serde::Serialize;

use super::{chemin_lerner_norm, Norm, NormSpec, TimeNormSpec};
use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::lattice::{Spectrum, TimeSeriesField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ScalingMode {
    /// `f ↦ f(λ·)`. With `gap = Some(ε0)` the data is assumed supported in
    /// `|ξ| >= ε0` and an exponential factor `2^{sλρ}` is fitted jointly.
    Contract { gap: Option<f64> },
    /// `f ↦ f(·/λ)`, measured in the norm with `s` replaced by `λs`.
    Dilate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub lambdas: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Fitted power of `λ`.
    pub exponent: f64,
    /// Exact exponent for data in a single dyadic block away from `j = 0`.
    pub reference_exponent: f64,
    /// Fitted `ρ` in `ratio ∝ λ^b 2^{sλρ}` (gap mode only).
    pub rate: Option<f64>,
    /// Power of `λ` after dividing out `2^{sλε0/3}` (gap mode only).
    pub literal_exponent: Option<f64>,
    pub fit_rms: f64,
}

fn fit(lambdas: &[f64], ratios: &[f64], exp_col: Option<f64>) -> Result<(Vec<f64>, f64)> {
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidParameter(format!("nonpositive norm ratio in {ratios:?}")));
    }
    let y: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let mut cols = vec![vec![1.0; lambdas.len()], lambdas.iter().map(|l| l.ln()).collect()];
    if let Some(scale) = exp_col {
        cols.push(lambdas.iter().map(|l| l * scale).collect());
    }
    if lambdas.len() < cols.len() {
        return Err(Error::InvalidParameter("too few λ values for the fit".into()));
    }
    least_squares(&cols, &y).ok_or_else(|| Error::InvalidParameter("degenerate λ list".into()))
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::InvalidParameter("λ values must be positive".into()));
    }
    Ok(())
}

/// Ratios `‖f_λ‖/‖f‖` of a Besov-type norm under rescaling, and fitted exponents.
pub fn scaling_probe(f: &Spectrum, spec: &NormSpec, lambdas: &[f64], mode: ScalingMode) -> Result<ScalingFit> {
    check_lambdas(lambdas)?;
    let norm = Norm::Besov(*spec, super::IndexSet::All);
    let base = norm.eval(f);
    if base == 0.0 {
        return Err(Error::InvalidParameter("zero data".into()));
    }
    let d = f.grid().dim() as f64;
    let length = f.grid().length();
    let dp = d * spec.p.recip();
    let mut ratios = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let r = match mode {
            ScalingMode::Contract { .. } => {
                let g = f.on_grid(f.grid().with_length(length / l)?)?;
                norm.eval(&g) / base
            }
            ScalingMode::Dilate => {
                let g = f.on_grid(f.grid().with_length(length * l)?)?;
                norm.with_s(spec.s * l).eval(&g) / base
            }
        };
        ratios.push(r);
    }
    let ln2s = spec.s * std::f64::consts::LN_2;
    match mode {
        ScalingMode::Contract { gap: Some(eps) } if spec.s != 0.0 => {
            let (c, rms) = fit(lambdas, &ratios, Some(1.0))?;
            let literal: Vec<f64> = lambdas
                .iter()
                .zip(&ratios)
                .map(|(l, r)| r / (ln2s * l * eps / 3.0).exp())
                .collect();
            let (lc, _) = fit(lambdas, &literal, None)?;
            Ok(ScalingFit {
                lambdas: lambdas.to_vec(),
                ratios,
                exponent: c[1],
                reference_exponent: spec.sigma - dp,
                rate: Some(c[2] / ln2s),
                literal_exponent: Some(lc[1]),
                fit_rms: rms,
            })
        }
        ScalingMode::Contract { .. } => {
            let (c, rms) = fit(lambdas, &ratios, None)?;
            Ok(ScalingFit {
                lambdas: lambdas.to_vec(),
                ratios,
                exponent: c[1],
                reference_exponent: spec.sigma - dp,
                rate: None,
                literal_exponent: None,
                fit_rms: rms,
            })
        }
        ScalingMode::Dilate => {
            let (c, rms) = fit(lambdas, &ratios, None)?;
            Ok(ScalingFit {
                lambdas: lambdas.to_vec(),
                ratios,
                exponent: c[1],
                reference_exponent: dp - spec.sigma,
                rate: None,
                literal_exponent: None,
                fit_rms: rms,
            })
        }
    }
}

/// Largest ratio `‖f‖_dst / ‖f‖_src` over the nonzero members of `family`.
pub fn embedding_probe(family: &[Spectrum], src: &Norm, dst: &Norm) -> f64 {
    family
        .iter()
        .filter_map(|f| {
            let a = src.eval(f);
            (a > 0.0).then(|| dst.eval(f) / a)
        })
        .fold(0.0, f64::max)
}

/// Ratios for `u(λx, λt)` in a Chemin–Lerner norm. The reference exponent
/// `σ - d/p - 1/γ` is exact for a time-independent single block.
pub fn space_time_scaling_probe(u: &TimeSeriesField, spec: &TimeNormSpec, lambdas: &[f64]) -> Result<ScalingFit> {
    check_lambdas(lambdas)?;
    let base = chemin_lerner_norm(u, spec)?;
    if base == 0.0 {
        return Err(Error::InvalidParameter("zero data".into()));
    }
    let mut ratios = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let grid = u.grid().with_length(u.grid().length() / l)?;
        let snaps = u
            .snapshots()
            .iter()
            .map(|s| s.on_grid(grid))
            .collect::<Result<Vec<_>>>()?;
        let times: Vec<f64> = u.times().iter().map(|t| t / l).collect();
        let scaled = TimeSeriesField::new(grid, times.clone(), snaps)?;
        let weights = spec.weights.iter().map(|w| w / l).collect();
        let sspec = TimeNormSpec::new(spec.gamma, spec.space, spec.set, times, weights)?;
        ratios.push(chemin_lerner_norm(&scaled, &sspec)? / base);
    }
    let (c, rms) = fit(lambdas, &ratios, None)?;
    let d = u.grid().dim() as f64;
    Ok(ScalingFit {
        lambdas: lambdas.to_vec(),
        ratios,
        exponent: c[1],
        reference_exponent: spec.space.sigma - d * spec.space.p.recip() - spec.gamma.recip(),
        rate: None,
        literal_exponent: None,
        fit_rms: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridSpec;
    use crate::spaces::{Exponent, IndexSet};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn mode(g: GridSpec, k: isize) -> Spectrum {
        let mut s = Spectrum::zeros(g);
        s.values_mut()[g.lattice_index(k).unwrap()] = Complex64::new(1.0, 0.0);
        s
    }

    #[test]
    fn plain_lp_scaling_exponent() {
        let g = GridSpec::new(1, 64, 2.0 * PI * 8.0).unwrap();
        let f = mode(g, 24);
        let spec = NormSpec::new(0.0, 0.0, Exponent::Finite(2.0), Exponent::Finite(2.0)).unwrap();
        let fit = scaling_probe(&f, &spec, &[2.0, 4.0, 8.0], ScalingMode::Contract { gap: None }).unwrap();
        assert!((fit.exponent + 0.5).abs() < 1e-10, "{fit:?}");
    }

    #[test]
    fn single_mode_gap_fit_is_exact() {
        let g = GridSpec::new(1, 64, 2.0 * PI * 8.0).unwrap();
        let f = mode(g, 24); // |ξ| = 3
        let spec = NormSpec::new(1.0, -0.25, Exponent::Finite(4.0), Exponent::Finite(2.0)).unwrap();
        let fit = scaling_probe(&f, &spec, &[2.0, 4.0, 8.0, 16.0], ScalingMode::Contract { gap: Some(3.0) }).unwrap();
        assert!((fit.exponent - 0.75).abs() < 1e-9, "{fit:?}");
        assert!((fit.rate.unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn dilation_reference() {
        let g = GridSpec::new(1, 256, 8.0 * PI).unwrap();
        let f = mode(g, 96); // |ξ| = 24
        let spec = NormSpec::new(-1.0, -0.5, Exponent::Finite(2.0), Exponent::Finite(1.0)).unwrap();
        let fit = scaling_probe(&f, &spec, &[2.0, 4.0, 8.0], ScalingMode::Dilate).unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-9, "{fit:?}");
    }

    #[test]
    fn space_time_reference_for_static_block() {
        let g = GridSpec::new(1, 64, 16.0 * PI).unwrap();
        let f = mode(g, 24);
        let times: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
        let u = TimeSeriesField::new(g, times.clone(), vec![f; 5]).unwrap();
        let space = NormSpec::new(0.5, 0.0, Exponent::Finite(3.0), Exponent::Finite(2.0)).unwrap();
        let spec = TimeNormSpec::trapezoid(Exponent::Finite(4.0), space, IndexSet::All, times).unwrap();
        let fit = space_time_scaling_probe(&u, &spec, &[2.0, 4.0]).unwrap();
        assert!((fit.exponent - fit.reference_exponent).abs() < 1e-9, "{fit:?}");
    }

    #[test]
    fn embedding_skips_zero_members() {
        let g = GridSpec::new(1, 32, 2.0 * PI).unwrap();
        let fam = vec![Spectrum::zeros(g), mode(g, 3)];
        let r = embedding_probe(&fam, &Norm::E { sigma: 0.0, s: 0.0 }, &Norm::E { sigma: 0.0, s: 0.0 });
        assert!((r - 1.0).abs() < 1e-15);
    }
}
