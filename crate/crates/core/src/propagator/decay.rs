//! Sup-norm decay of frequency-localized Klein–Gordon kernels and windowed
//! Strichartz ratios.

use num_complex::Complex64;
use serde::Serialize;

use super::{half_wave, ExponentTable, PropagatorSpec};
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::lattice::{inverse, l1_norm, Field, GridSpec, Spectrum, TimeSeriesField};
use crate::littlewood_paley::BumpProfile;
use crate::spaces::{chemin_lerner_norm, e_norm, Exponent, IndexSet, NormSpec, TimeNormSpec};

/// Largest tolerated fraction of `|K|²` in the outer shell `|x_i| > 0.45 L`.
pub const WRAP_LIMIT: f64 = 1e-6;
const SHELL: f64 = 0.45;

/// Fine torus used for a decay scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FineGridPolicy {
    pub length: f64,
    pub n: usize,
}

impl FineGridPolicy {
    /// Long torus for kernels spreading at group speed below 1, with the
    /// Nyquist frequency above the block support (four-fold in one dimension
    /// so the sampled sup is accurate). Coarse blocks in `d >= 2` get extra
    /// room: the kinks of the `ℓ1` bump on the axes leave algebraic tails.
    pub fn auto(d: usize, j: usize, t_max: f64) -> Self {
        let factor = match (d, j) {
            (1, _) => 8.0,
            (_, 0..=2) => 6.0,
            _ => 3.0,
        };
        let length = (factor * t_max).max(32.0);
        let oversample = if d == 1 { 4.0 } else { 1.0 };
        let top = BumpProfile::STANDARD.block_support(j).1 * oversample;
        let mut n = 16;
        while std::f64::consts::PI * (n as f64) / length < top {
            n *= 2;
        }
        Self { length, n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `2^j <= λ`: reference slope `-d/2`.
    Low,
    /// `2^j > λ`: slope between `-d/2` and `-(d-1)/2`.
    High,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayScanReport {
    pub d: usize,
    pub lambda: f64,
    pub j: usize,
    pub regime: Regime,
    pub length: f64,
    pub n: usize,
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub slope: f64,
    /// Slope interval predicted for this regime.
    pub reference: (f64, f64),
    /// `(2π)^{-d} ‖φ_j‖_{L^1_ξ}`, a bound on every sup norm.
    pub plateau_bound: f64,
    pub wrap_fraction: f64,
}

impl DecayScanReport {
    /// Slope inside the reference interval widened by `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.slope >= self.reference.0 - tol && self.slope <= self.reference.1 + tol
    }
}

/// Fraction of `Σ|f|²` on points whose periodic offset from `center` exceeds
/// `0.45 L` along some axis.
pub(crate) fn shell_fraction(f: &Field, center: &[f64]) -> f64 {
    let g = f.grid();
    let l = g.length();
    let mut total = 0.0;
    let mut outer = 0.0;
    for (i, z) in f.values().iter().enumerate() {
        let x = g.position(i);
        let far = (0..g.dim()).any(|a| {
            let mut dx = (x[a] - center[a]).rem_euclid(l);
            if dx > l / 2.0 {
                dx = l - dx;
            }
            dx > SHELL * l
        });
        let m = z.norm_sqr();
        total += m;
        if far {
            outer += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

/// Fitted log–log slope of `t ↦ sup_x |F^{-1}[e^{itω} φ_j](x)|`, with
/// `φ_0 = ψ` (inhomogeneous block).
pub fn decay_scan(d: usize, lambda: f64, j: usize, times: &[f64], policy: FineGridPolicy) -> Result<DecayScanReport> {
    let spec = PropagatorSpec::new(lambda)?;
    if times.len() < 2 || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("scan times must be positive and increasing".into()));
    }
    let grid = GridSpec::new(d, policy.n, policy.length)?;
    let profile = BumpProfile::STANDARD;
    let kernel = Spectrum::from_transform(grid, |xi| Complex64::new(profile.block_weight(j, l1_norm(xi)), 0.0));
    let plateau_bound = kernel.values().iter().map(|c| c.norm()).sum::<f64>() / (grid.len() as f64).sqrt();
    let origin = [0.0; 3];
    let mut sup_norms = Vec::with_capacity(times.len());
    let mut wrap_fraction: f64 = 0.0;
    for &t in times {
        let k = inverse(&half_wave(&kernel, &spec, t)?);
        sup_norms.push(k.max_abs());
        wrap_fraction = wrap_fraction.max(shell_fraction(&k, &origin[..d]));
    }
    if wrap_fraction > WRAP_LIMIT {
        return Err(Error::WrapAround {
            fraction: wrap_fraction,
            limit: WRAP_LIMIT,
        });
    }
    let (slope, _) = loglog_slope(times, &sup_norms)
        .ok_or_else(|| Error::InvalidParameter("degenerate decay fit".into()))?;
    let df = d as f64;
    let regime = if 2f64.powi(j as i32) <= lambda { Regime::Low } else { Regime::High };
    let reference = match regime {
        Regime::Low => (-df / 2.0, -df / 2.0),
        Regime::High => (-df / 2.0, (1.0 - df) / 2.0),
    };
    Ok(DecayScanReport {
        d,
        lambda,
        j,
        regime,
        length: policy.length,
        n: policy.n,
        times: times.to_vec(),
        sup_norms,
        slope,
        reference,
        plateau_bound,
        wrap_fraction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrichartzSample {
    pub lambda: f64,
    pub horizon: f64,
    pub steps: usize,
    pub table: ExponentTable,
    /// Besov regularity index used on the left-hand side.
    pub space_sigma: f64,
    pub prefactor: f64,
    pub ratios: Vec<f64>,
    pub constant: f64,
    pub wrap_fraction: f64,
}

/// Windowed ratio `c_λ ‖U_λ(t)u0‖_{L̃^γ(0,T; B^{σ'}_{p,2}(set))} / ‖u0‖_{E^{σ,s}}`
/// with `c_λ = λ^{-1/γ}`, `σ' = σ - (1-θ)δ` on `Z_λ` and `c_λ = λ^{θδ}`,
/// `σ' = σ - σ(θ,p)` on its complement. Zero members are skipped.
#[allow(clippy::too_many_arguments)]
pub fn strichartz_sample(
    family: &[Spectrum],
    spec: &PropagatorSpec,
    table: &ExponentTable,
    set: IndexSet,
    sigma: f64,
    s: f64,
    horizon: f64,
    steps: usize,
) -> Result<StrichartzSample> {
    let lambda = spec.lambda();
    let (prefactor, space_sigma) = match set {
        IndexSet::ZlambdaC(_) => (lambda.powf(table.theta * table.delta), sigma - table.sigma),
        _ => (lambda.powf(-table.gamma.recip()), sigma - (1.0 - table.theta) * table.delta),
    };
    let times = super::uniform_times(horizon, steps)?;
    let space = NormSpec::new(space_sigma, s, table.p, Exponent::Finite(2.0))?;
    let tspec = TimeNormSpec::trapezoid(table.gamma, space, set, times.clone())?;
    let mut ratios = Vec::new();
    let mut wrap_fraction: f64 = 0.0;
    for u0 in family {
        let base = e_norm(u0, sigma, s);
        if base == 0.0 {
            continue;
        }
        let field0 = inverse(u0);
        let peak = field0
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let center = field0.grid().position(peak);
        let mut snaps = Vec::with_capacity(times.len());
        for &t in &times {
            let u = half_wave(u0, spec, t)?;
            wrap_fraction = wrap_fraction.max(shell_fraction(&inverse(&u), &center[..u0.grid().dim()]));
            snaps.push(u);
        }
        if wrap_fraction > WRAP_LIMIT {
            return Err(Error::WrapAround {
                fraction: wrap_fraction,
                limit: WRAP_LIMIT,
            });
        }
        let series = TimeSeriesField::new(*u0.grid(), times.clone(), snaps)?;
        ratios.push(prefactor * chemin_lerner_norm(&series, &tspec)? / base);
    }
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(StrichartzSample {
        lambda,
        horizon,
        steps,
        table: *table,
        space_sigma,
        prefactor,
        ratios,
        constant,
        wrap_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{project, SupportRegion};
    use crate::propagator::strichartz_exponents;

    #[test]
    fn auto_policy_resolves_block() {
        let p = FineGridPolicy::auto(2, 5, 64.0);
        assert_eq!(p.n, 4096);
        assert_eq!(p.length, 192.0);
        assert_eq!(FineGridPolicy::auto(2, 1, 64.0).length, 384.0);
        let p = FineGridPolicy::auto(1, 0, 64.0);
        assert_eq!(p.length, 512.0);
        assert!(std::f64::consts::PI * p.n as f64 / p.length >= 5.0);
    }

    #[test]
    fn plateau_bounds_every_sup() {
        let times = [0.5, 1.0, 2.0, 4.0];
        let r = decay_scan(1, 2.0, 1, &times, FineGridPolicy::auto(1, 1, 32.0)).unwrap();
        assert!(r.sup_norms.iter().all(|s| *s <= r.plateau_bound * (1.0 + 1e-12)));
        assert_eq!(r.regime, Regime::Low);
    }

    #[test]
    fn small_torus_is_flagged() {
        let times = [4.0, 8.0, 16.0, 32.0];
        let policy = FineGridPolicy { length: 20.0, n: 256 };
        assert!(matches!(decay_scan(1, 1.0, 0, &times, policy), Err(Error::WrapAround { .. })));
    }

    fn packet(g: GridSpec) -> Spectrum {
        let s = Spectrum::from_transform(g, |xi| {
            let r = xi[0] - 2.0;
            Complex64::new((-r * r / (2.0 * 0.25f64.powi(2))).exp(), 0.0)
        });
        // Center the packet in the box.
        let half = g.length() / 2.0;
        project(&s, SupportRegion::Octant).multiply_complex(|xi| Complex64::from_polar(1.0, -xi[0] * half))
    }

    #[test]
    fn windowed_ratio_is_refinement_stable() {
        let table = strichartz_exponents(1, Exponent::Finite(6.0), 1.0).unwrap();
        let spec = PropagatorSpec::new(4.0).unwrap();
        let run = |n: usize| {
            let g = GridSpec::new(1, n, 160.0).unwrap();
            let zero = Spectrum::zeros(g);
            strichartz_sample(&[zero, packet(g)], &spec, &table, IndexSet::Zlambda(4.0), 0.5, -0.2, 32.0, 64)
                .unwrap()
        };
        let a = run(512);
        let b = run(1024);
        assert_eq!(a.ratios.len(), 1);
        assert!(a.constant.is_finite() && a.constant > 0.0);
        assert!((a.constant / b.constant - 1.0).abs() < 0.2, "{} {}", a.constant, b.constant);
    }
}
