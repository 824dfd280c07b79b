//! Initial-data families with first-octant frequency support.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{l1_norm, l2_norm, GridSpec, Spectrum};

const TRUNCATION_WIDTHS: f64 = 6.0;

/// `amplitude · exp(-|ξ - ξ0|²/(2w²))` in continuum normalization, cut at
/// `|ξ - ξ0| > 6w`. The cut ball must lie in the open octant and, when given,
/// inside `max_i |k_i| <= band`.
pub fn gen_gaussian_octant(
    grid: &GridSpec,
    center: &[f64],
    width: f64,
    amplitude: f64,
    band: Option<usize>,
) -> Result<Spectrum> {
    if center.len() != grid.dim() {
        return Err(Error::InvalidParameter(format!("center has {} components for d = {}", center.len(), grid.dim())));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidParameter(format!("width {width} must be positive")));
    }
    let radius = TRUNCATION_WIDTHS * width;
    if center.iter().any(|&c| c - radius <= 0.0) {
        return Err(Error::Precondition(format!(
            "truncated Gaussian at {center:?} with radius {radius} leaves the open octant"
        )));
    }
    let top = band.map_or(grid.n() / 2 - 1, |b| b.min(grid.n() / 2 - 1)) as f64 * grid.freq_step();
    if center.iter().any(|&c| c + radius > top) {
        return Err(Error::Precondition(format!(
            "truncated Gaussian at {center:?} with radius {radius} exceeds the band edge {top:.4}"
        )));
    }
    Ok(Spectrum::from_transform(*grid, |xi| {
        let off: Vec<f64> = xi.iter().zip(center).map(|(x, c)| x - c).collect();
        let r = l2_norm(&off);
        if r > radius {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(amplitude * (-r * r / (2.0 * width * width)).exp(), 0.0)
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SokhotskiPlemelj {
    #[serde(skip)]
    pub spectrum: Spectrum,
    /// Fraction of the `E^{0,s}` norm carried by the continuation of the
    /// profile beyond the lattice Nyquist frequency; infinite if it diverges.
    pub tail_fraction: f64,
}

/// One-dimensional profile `(i(ξ-ε))^k H(ξ-ε)`, or `e^{λ_ser(ξ-ε)} H(ξ-ε)`
/// when `series_rate` is given, cut at the lattice Nyquist frequency.
/// `s` is the smoothing index of the norm used to report the tail.
pub fn gen_sokhotski_plemelj(
    grid: &GridSpec,
    k: u32,
    eps: f64,
    series_rate: Option<f64>,
    s: f64,
) -> Result<SokhotskiPlemelj> {
    if grid.dim() != 1 {
        return Err(Error::InvalidParameter("Sokhotski–Plemelj data is one-dimensional".into()));
    }
    let step = grid.freq_step();
    let m0 = eps / step;
    if !(eps > 0.0) || (m0 - m0.round()).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be a positive lattice frequency")));
    }
    let m0 = m0.round() as usize;
    if m0 >= grid.n() / 2 {
        return Err(Error::InvalidParameter(format!("ε = {eps} is beyond the Nyquist frequency")));
    }
    if let Some(rate) = series_rate {
        if !(rate > 0.0 && rate < s.abs() * std::f64::consts::LN_2 && s < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "series rate {rate} must lie in (0, |s| ln 2) with s = {s} < 0"
            )));
        }
    }
    let profile = |xi: f64| -> Complex64 {
        if xi < eps - 0.5 * step {
            return Complex64::new(0.0, 0.0);
        }
        let x = (xi - eps).max(0.0);
        match series_rate {
            Some(rate) => Complex64::new((rate * x).exp(), 0.0),
            None => Complex64::new(0.0, x).powu(k),
        }
    };
    let spectrum = Spectrum::from_transform(*grid, |xi| profile(xi[0]));
    // Continue the lattice sum of |2^{sξ} û|² past Nyquist until it settles.
    let weight = |m: usize| {
        let xi = m as f64 * step;
        ((s * xi).exp2() * profile(xi).norm()).powi(2)
    };
    let inside: f64 = (m0..grid.n() / 2).map(weight).sum();
    let tail_fraction = if s >= 0.0 {
        f64::INFINITY
    } else {
        let mut tail = 0.0;
        let mut m = grid.n() / 2;
        loop {
            let w = weight(m);
            tail += w;
            m += 1;
            if !w.is_finite() || w <= 1e-40 * (inside + tail) || m > 64 * grid.n() + 1_000_000 {
                break;
            }
        }
        if tail.is_finite() && inside > 0.0 {
            (tail / (inside + tail)).sqrt()
        } else {
            f64::INFINITY
        }
    };
    Ok(SokhotskiPlemelj { spectrum, tail_fraction })
}

/// Number of lattice frequencies with `|ξ|_1 <= 1/k`.
pub fn concentrating_support(grid: &GridSpec, k: u32) -> usize {
    let r = 1.0 / k as f64;
    let mut count = 0;
    grid.for_each_frequency(|_, xi| {
        if l1_norm(xi) <= r {
            count += 1;
        }
    });
    count
}

/// `φ̂_k = k^{d/2} χ_{|ξ|_1 <= 1/k}` in continuum normalization.
pub fn gen_concentrating(grid: &GridSpec, k: u32) -> Result<Spectrum> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let points = concentrating_support(grid, k);
    if points < 3 {
        return Err(Error::Precondition(format!(
            "ball of radius 1/{k} holds {points} lattice points; refine the torus"
        )));
    }
    let r = 1.0 / k as f64;
    let h = (k as f64).powf(grid.dim() as f64 / 2.0);
    Ok(Spectrum::from_transform(*grid, |xi| {
        Complex64::new(if l1_norm(xi) <= r { h } else { 0.0 }, 0.0)
    }))
}
