//! Parabolic rescaling `u_λ(x, t) = λ^{2/α} u(λx, λt)` on companion tori,
//! λ selection and the discrete PDE residual.

use serde::Serialize;

use super::nonlinearity::{apply_nonlinearity, NonlinearitySpec};
use crate::error::{Error, Result};
use crate::lattice::{project, support_mass_outside, GridSpec, Spectrum, SupportRegion, TimeSeriesField};
use crate::propagator::PropagatorSpec;
use crate::spaces::e_norm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `u ↦ u_λ`: torus `L/λ`, times `t/λ`.
    Forward,
    /// `u_λ ↦ u`: torus `λL`, times `λt`.
    Back,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) || lambda.log2().fract() != 0.0 {
        return Err(Error::InvalidParameter(format!("λ = {lambda} must be a power of two")));
    }
    Ok(())
}

/// `2/α`, or `0` for the exponential nonlinearities.
fn amplitude_exponent(alpha: Option<u32>) -> f64 {
    alpha.map_or(0.0, |a| 2.0 / a as f64)
}

/// Torus and amplitude factor for one direction.
fn companion(grid: &GridSpec, lambda: f64, alpha: Option<u32>, dir: Direction) -> Result<(GridSpec, f64, f64)> {
    check_lambda(lambda)?;
    let a = amplitude_exponent(alpha);
    match dir {
        Direction::Forward => Ok((grid.with_length(grid.length() / lambda)?, lambda.powf(a), 1.0 / lambda)),
        Direction::Back => Ok((grid.with_length(grid.length() * lambda)?, lambda.powf(-a), lambda)),
    }
}

/// Exact remap of a series: same coefficients on the companion torus, times
/// rescaled, amplitude `λ^{±2/α}`.
pub fn scale_solution(u: &TimeSeriesField, lambda: f64, alpha: Option<u32>, dir: Direction) -> Result<TimeSeriesField> {
    let (grid, amp, tfac) = companion(u.grid(), lambda, alpha, dir)?;
    let snaps = u
        .snapshots()
        .iter()
        .map(|s| s.scaled(amp).on_grid(grid))
        .collect::<Result<Vec<_>>>()?;
    TimeSeriesField::new(grid, u.times().iter().map(|t| t * tfac).collect(), snaps)
}

/// `(u0, u1) ↦ (λ^{2/α} u0(λ·), λ^{2/α+1} u1(λ·))` and its inverse.
pub fn scale_data(
    u0: &Spectrum,
    u1: &Spectrum,
    lambda: f64,
    alpha: Option<u32>,
    dir: Direction,
) -> Result<(Spectrum, Spectrum)> {
    let (grid, amp, tfac) = companion(u0.grid(), lambda, alpha, dir)?;
    if u0.grid() != u1.grid() {
        return Err(Error::GridMismatch("u0 and u1 live on different grids".into()));
    }
    Ok((u0.scaled(amp).on_grid(grid)?, u1.scaled(amp / tfac).on_grid(grid)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaChoice {
    pub lambda: f64,
    /// Smoothing index `λ s` seen by the unscaled data.
    pub s0: f64,
    /// `(λ, ‖u_{0,λ}‖_{E^{σ,s}} + ‖u_{1,λ}‖_{E^{σ-1,s}})` along the scanned grid.
    pub norms: Vec<(f64, f64)>,
}

/// Smallest `λ` in `lambda_grid` whose rescaled data has
/// `‖u_{0,λ}‖_{E^{σ,s}} + ‖u_{1,λ}‖_{E^{σ-1,s}} <= δ`.
#[allow(clippy::too_many_arguments)]
pub fn select_lambda(
    u0: &Spectrum,
    u1: &Spectrum,
    sigma: f64,
    s: f64,
    alpha: Option<u32>,
    epsilon0: Option<f64>,
    delta: f64,
    lambda_grid: &[f64],
) -> Result<LambdaChoice> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be positive")));
    }
    if let Some(eps) = epsilon0 {
        let leak = support_mass_outside(u1, SupportRegion::Annulus(eps));
        if leak > 1e-12 {
            return Err(Error::Precondition(format!("u1 has mass fraction {leak:.3e} below the gap ε0 = {eps}")));
        }
    }
    let mut grid: Vec<f64> = lambda_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut norms = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let (a, b) = scale_data(u0, u1, lambda, alpha, Direction::Forward)?;
        let total = e_norm(&a, sigma, s) + e_norm(&b, sigma - 1.0, s);
        norms.push((lambda, total));
        if total <= delta {
            return Ok(LambdaChoice {
                lambda,
                s0: lambda * s,
                norms,
            });
        }
    }
    let best = norms.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Err(Error::Precondition(format!(
        "no λ in the grid reaches δ = {delta:.3e}; smallest scaled norm {best:.3e}"
    )))
}

/// `max_m ‖D_t² u + ω² u + c f(u)‖ / max_m ‖ω² u‖` over interior nodes of a
/// uniform series, in coefficient `ℓ2`. The nonlinearity is evaluated on the
/// band `band` and projected back onto it.
pub fn pde_residual(
    u: &TimeSeriesField,
    nl: &NonlinearitySpec,
    lambda: f64,
    coefficient: f64,
    band: usize,
) -> Result<f64> {
    let spec = PropagatorSpec::new(lambda)?;
    let times = u.times();
    if times.len() < 3 {
        return Err(Error::InvalidParameter("need at least three time nodes".into()));
    }
    let dt = times[1] - times[0];
    if times.windows(2).any(|w| ((w[1] - w[0]) / dt - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidParameter("time grid must be uniform".into()));
    }
    let snaps = u.snapshots();
    let omega2 = |s: &Spectrum| s.multiply(|xi| spec.omega(xi).powi(2));
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for m in 1..snaps.len() - 1 {
        let lin = omega2(&snaps[m]);
        let f = project(&apply_nonlinearity(&snaps[m], nl, band)?, SupportRegion::IndexBox(band));
        let d2 = snaps[m + 1]
            .sub(&snaps[m].scaled(2.0))?
            .add(&snaps[m - 1])?
            .scaled(1.0 / (dt * dt));
        let r = d2.add(&lin)?.add(&f.scaled(coefficient))?;
        worst = worst.max(r.l2_sum());
        scale = scale.max(lin.l2_sum());
    }
    Ok(if scale == 0.0 { worst } else { worst / scale })
}
