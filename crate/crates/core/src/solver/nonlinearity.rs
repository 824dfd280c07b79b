//! Polynomial and truncated-series nonlinearities, evaluated pointwise with
//! an alias-free band contract.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{forward, inverse, project, support_mass_outside, Spectrum, SupportRegion};

/// Relative coefficient mass tolerated outside a required band.
pub const BAND_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    /// `u^{1+α}`.
    Power { alpha: u32 },
    /// `sinh u - u`.
    SinhMinusU,
    /// `sin u - u`.
    SinMinusU,
    /// `e^{u²} u - u`.
    ExpSquareMinusU,
}

/// `f(u) = sign · g(u)` with `g` one of the kinds above; series kinds keep
/// `taylor_terms` nonzero terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    pub sign: f64,
    pub taylor_terms: usize,
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

impl NonlinearitySpec {
    /// `sign` is `±1`, or `0` for the linear reference problem.
    pub fn new(kind: NonlinearityKind, sign: f64, taylor_terms: usize) -> Result<Self> {
        if ![-1.0, 0.0, 1.0].contains(&sign) {
            return Err(Error::InvalidParameter(format!("sign {sign} must be -1, 0 or 1")));
        }
        if let NonlinearityKind::Power { alpha } = kind {
            if alpha == 0 {
                return Err(Error::InvalidParameter("α must be >= 1".into()));
            }
        } else if taylor_terms == 0 {
            return Err(Error::InvalidParameter("taylor_terms must be >= 1".into()));
        }
        Ok(Self {
            kind,
            sign,
            taylor_terms,
        })
    }

    pub fn power(alpha: u32, sign: f64) -> Result<Self> {
        Self::new(NonlinearityKind::Power { alpha }, sign, 1)
    }

    pub fn is_series(&self) -> bool {
        !matches!(self.kind, NonlinearityKind::Power { .. })
    }

    /// `(m, c_m)` with `g(u) = Σ c_m u^m`, increasing in `m`.
    pub fn terms(&self) -> Vec<(u32, f64)> {
        let t = self.taylor_terms as u32;
        match self.kind {
            NonlinearityKind::Power { alpha } => vec![(alpha + 1, 1.0)],
            NonlinearityKind::SinhMinusU => (1..=t).map(|k| (2 * k + 1, 1.0 / factorial(2 * k + 1))).collect(),
            NonlinearityKind::SinMinusU => (1..=t)
                .map(|k| (2 * k + 1, if k % 2 == 1 { -1.0 } else { 1.0 } / factorial(2 * k + 1)))
                .collect(),
            NonlinearityKind::ExpSquareMinusU => (1..=t).map(|m| (2 * m + 1, 1.0 / factorial(m))).collect(),
        }
    }

    /// `α` for powers; `2·taylor_terms + 1` for series kinds.
    pub fn effective_alpha(&self) -> u32 {
        match self.kind {
            NonlinearityKind::Power { alpha } => alpha,
            _ => 2 * self.taylor_terms as u32 + 1,
        }
    }

    /// Highest power evaluated.
    pub fn degree(&self) -> u32 {
        self.terms().last().map(|t| t.0).unwrap_or(1)
    }

    /// Size of the first omitted series term at `|u| = vmax`; zero for powers.
    pub fn next_term_bound(&self, vmax: f64) -> f64 {
        let t = self.taylor_terms as u32 + 1;
        match self.kind {
            NonlinearityKind::Power { .. } => 0.0,
            NonlinearityKind::SinhMinusU | NonlinearityKind::SinMinusU => vmax.powi(2 * t as i32 + 1) / factorial(2 * t + 1),
            NonlinearityKind::ExpSquareMinusU => vmax.powi(2 * t as i32 + 1) / factorial(t),
        }
    }

    /// Successive ratios `|c_{m+2} / c_m|` of the series coefficients.
    pub fn coefficient_ratios(&self) -> Vec<f64> {
        self.terms().windows(2).map(|w| (w[1].1 / w[0].1).abs()).collect()
    }

    pub fn eval(&self, v: Complex64) -> Complex64 {
        if self.sign == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let terms = self.terms();
        match self.kind {
            NonlinearityKind::Power { alpha } => self.sign * v.powu(alpha + 1),
            _ => {
                // Horner in v² over the odd powers 3, 5, ..., then times v³.
                let v2 = v * v;
                let mut acc = Complex64::new(0.0, 0.0);
                for &(_, c) in terms.iter().rev() {
                    acc = acc * v2 + c;
                }
                self.sign * acc * v2 * v
            }
        }
    }
}

/// Largest per-axis index `K` with `(1 + α_eff) K <= n/2 - 1`.
pub fn band_limit(n: usize, alpha_eff: u32) -> usize {
    (n / 2 - 1) / (1 + alpha_eff as usize)
}

fn check_band(v: &Spectrum, band: usize) -> Result<()> {
    let out = support_mass_outside(v, SupportRegion::IndexBox(band));
    if out > BAND_TOL {
        return Err(Error::Precondition(format!(
            "input mass fraction {out:.3e} outside the band |k_i| <= {band}"
        )));
    }
    Ok(())
}

/// `f(v)` for `v` band-limited to `|k_i| <= band`; modes beyond the exact
/// product band `degree · band` are zeroed.
pub fn apply_nonlinearity(v: &Spectrum, spec: &NonlinearitySpec, band: usize) -> Result<Spectrum> {
    let degree = spec.degree() as usize;
    if degree * band > v.grid().n() / 2 - 1 {
        return Err(Error::Precondition(format!(
            "band {band} times degree {degree} exceeds the lattice Nyquist index"
        )));
    }
    check_band(v, band)?;
    let f = inverse(v).map(|z| spec.eval(z));
    Ok(project(&forward(&f), SupportRegion::IndexBox(degree * band)))
}

/// Pointwise product of band-limited factors, alias-free by the same contract.
pub fn dealiased_product(factors: &[Spectrum], band: usize) -> Result<Spectrum> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
    if factors.len() * band > first.grid().n() / 2 - 1 {
        return Err(Error::Precondition("product band exceeds the lattice Nyquist index".into()));
    }
    let mut acc = inverse(first);
    check_band(first, band)?;
    for f in &factors[1..] {
        check_band(f, band)?;
        acc = acc.mul(&inverse(f))?;
    }
    Ok(project(&forward(&acc), SupportRegion::IndexBox(factors.len() * band)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn series_coefficients() {
        let s = NonlinearitySpec::new(NonlinearityKind::SinhMinusU, 1.0, 3).unwrap();
        assert_eq!(s.terms(), vec![(3, 1.0 / 6.0), (5, 1.0 / 120.0), (7, 1.0 / 5040.0)]);
        assert_eq!(s.effective_alpha(), 7);
        let s = NonlinearitySpec::new(NonlinearityKind::SinMinusU, 1.0, 2).unwrap();
        assert_eq!(s.terms(), vec![(3, -1.0 / 6.0), (5, 1.0 / 120.0)]);
        let s = NonlinearitySpec::new(NonlinearityKind::ExpSquareMinusU, 1.0, 3).unwrap();
        assert_eq!(s.terms(), vec![(3, 1.0), (5, 0.5), (7, 1.0 / 6.0)]);
        assert!(s.coefficient_ratios().windows(2).all(|w| w[1] < w[0]));
        assert!(NonlinearitySpec::new(NonlinearityKind::SinhMinusU, 1.0, 0).is_err());
        assert!(NonlinearitySpec::power(0, 1.0).is_err());
        assert!(NonlinearitySpec::power(2, 0.5).is_err());
    }

    #[test]
    fn scalar_sinh_against_expm1() {
        let s = NonlinearitySpec::new(NonlinearityKind::SinhMinusU, 1.0, 2).unwrap();
        for v in [1e-3, -7e-4, 3.3e-4, 0.0] {
            let exact = (f64::exp_m1(v) - f64::exp_m1(-v)) / 2.0 - v;
            assert!((s.eval(Complex64::new(v, 0.0)).re - exact).abs() < 1e-18);
        }
        let sin = NonlinearitySpec::new(NonlinearityKind::SinMinusU, 1.0, 4).unwrap();
        let x: f64 = 0.3;
        assert!((sin.eval(Complex64::new(x, 0.0)).re - (x.sin() - x)).abs() < 1e-12);
        let e = NonlinearitySpec::new(NonlinearityKind::ExpSquareMinusU, -1.0, 12).unwrap();
        assert!((e.eval(Complex64::new(x, 0.0)).re + ((x * x).exp() * x - x)).abs() < 1e-15);
    }

    #[test]
    fn single_mode_power_is_exact() {
        let g = GridSpec::new(1, 64, 2.0 * PI).unwrap();
        let spec = NonlinearitySpec::power(2, 1.0).unwrap();
        let band = band_limit(64, 2);
        assert_eq!(band, 10);
        let c = Complex64::new(0.3, -0.2);
        let mut v = Spectrum::zeros(g);
        v.values_mut()[4] = c;
        let out = apply_nonlinearity(&v, &spec, band).unwrap();
        // Unitary DFT: a mode of coefficient c has samples c n^{-1/2} e^{iξx}.
        let expect = c.powu(3) / 64.0;
        for (i, z) in out.values().iter().enumerate() {
            let e = if i == 12 { expect } else { Complex64::new(0.0, 0.0) };
            assert!((z - e).norm() < 1e-16, "{i} {z}");
        }
    }

    #[test]
    fn zero_input_and_band_violation() {
        let g = GridSpec::new(2, 16, 2.0 * PI).unwrap();
        let spec = NonlinearitySpec::new(NonlinearityKind::ExpSquareMinusU, 1.0, 1).unwrap();
        let band = band_limit(16, spec.effective_alpha());
        assert_eq!(apply_nonlinearity(&Spectrum::zeros(g), &spec, band).unwrap().max_abs(), 0.0);
        let mut v = Spectrum::zeros(g);
        v.values_mut()[g.flat_index(&[5, 0])] = Complex64::new(1.0, 0.0);
        assert!(apply_nonlinearity(&v, &spec, band).is_err());
    }
}
