//! Picard iteration for `∂²v + λ²v - Δv + c f(v) = 0` on first-octant data,
//! with `c = 1` or `c = λ²`.

use std::time::Instant;

use serde::Serialize;

use super::nonlinearity::{apply_nonlinearity, band_limit, NonlinearitySpec, BAND_TOL};
use crate::error::{Error, Result};
use crate::lattice::{project, support_mass_outside, Spectrum, SupportRegion, TimeSeriesField};
use crate::propagator::{linear_solve, sine_duhamel_series, uniform_times, PropagatorSpec};
use crate::spaces::e_norm;

/// Largest tolerated top-octave mass fraction of an iterate.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Coefficient in front of the nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearScaling {
    /// `c = 1`: the power-law rescaled equation.
    Unit,
    /// `c = λ²`: the rescaled sinh-Gordon-type equation.
    MassSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub horizon: f64,
    pub steps: usize,
    pub picard_tol: f64,
    pub max_iter: usize,
    /// Per-axis band limit `K_max`; `None` derives it from the nonlinearity.
    pub band: Option<usize>,
    pub scaling: NonlinearScaling,
    /// `(σ, s)` of the monitoring norm `E^{σ,s}`.
    pub monitor: (f64, f64),
}

impl SolverConfig {
    pub fn new(lambda: f64, horizon: f64, steps: usize) -> Self {
        Self {
            lambda,
            horizon,
            steps,
            picard_tol: 1e-10,
            max_iter: 50,
            band: None,
            scaling: NonlinearScaling::Unit,
            monitor: (0.0, 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon {} must be positive", self.horizon)));
        }
        if self.steps < 8 {
            return Err(Error::InvalidParameter(format!("N_t = {} must be >= 8", self.steps)));
        }
        if !(self.picard_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter("picard_tol > 0 and max_iter >= 1 required".into()));
        }
        PropagatorSpec::new(self.lambda)?;
        Ok(())
    }

    pub fn coefficient(&self) -> f64 {
        match self.scaling {
            NonlinearScaling::Unit => 1.0,
            NonlinearScaling::MassSquared => self.lambda * self.lambda,
        }
    }

    pub fn resolved_band(&self, n: usize, nl: &NonlinearitySpec) -> usize {
        self.band.unwrap_or_else(|| band_limit(n, nl.effective_alpha()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `sup_t ‖v_k - v_{k-1}‖ / sup_t ‖v_k‖` in the monitoring norm.
    pub successive_difference: f64,
    /// Same measure of `v_k - T(v_k)`.
    pub residual: f64,
    pub octant_leakage: f64,
    /// Largest relative mass of `f(v)` dropped outside the band.
    pub dealias_tail: f64,
    pub top_octave_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationReport {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations_used: usize,
    pub final_residual: f64,
    pub contraction_ratio: Option<f64>,
    pub band: usize,
    pub coefficient: f64,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

/// `sup_t ‖u(t)‖_{E^{σ,s}}`.
pub fn series_norm(u: &TimeSeriesField, sigma: f64, s: f64) -> f64 {
    u.snapshots().iter().map(|f| e_norm(f, sigma, s)).fold(0.0, f64::max)
}

/// `sup_t ‖a - b‖ / sup_t ‖a‖`, absolute when `a` vanishes.
pub fn relative_distance(a: &TimeSeriesField, b: &TimeSeriesField, sigma: f64, s: f64) -> Result<f64> {
    let diff = series_norm(&a.sub(b)?, sigma, s);
    let scale = series_norm(a, sigma, s);
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

struct Map<'a> {
    nl: &'a NonlinearitySpec,
    spec: PropagatorSpec,
    band: usize,
    coefficient: f64,
    free: TimeSeriesField,
}

impl Map<'_> {
    /// `T(v)` and the largest dropped tail fraction.
    fn apply(&self, v: &TimeSeriesField) -> Result<(TimeSeriesField, f64)> {
        let mut tail: f64 = 0.0;
        let mut forcing = Vec::with_capacity(v.len());
        for snap in v.snapshots() {
            let f = apply_nonlinearity(snap, self.nl, self.band)?;
            tail = tail.max(support_mass_outside(&f, SupportRegion::IndexBox(self.band)));
            forcing.push(project(&f, SupportRegion::IndexBox(self.band)).scaled(-self.coefficient));
        }
        let forcing = TimeSeriesField::new(*v.grid(), v.times().to_vec(), forcing)?;
        let duhamel = sine_duhamel_series(&forcing, &self.spec)?;
        let snaps = self
            .free
            .snapshots()
            .iter()
            .zip(duhamel.snapshots())
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok((TimeSeriesField::new(*v.grid(), v.times().to_vec(), snaps)?, tail))
    }
}

fn worst_over(u: &TimeSeriesField, region: SupportRegion) -> f64 {
    u.snapshots()
        .iter()
        .map(|s| support_mass_outside(s, region))
        .fold(0.0, f64::max)
}

fn check_data(u: &Spectrum, band: usize, name: &str) -> Result<()> {
    let leak = support_mass_outside(u, SupportRegion::Octant);
    if leak > BAND_TOL {
        return Err(Error::Precondition(format!("{name} has mass fraction {leak:.3e} outside the octant")));
    }
    let out = support_mass_outside(u, SupportRegion::IndexBox(band));
    if out > BAND_TOL {
        return Err(Error::Precondition(format!("{name} has mass fraction {out:.3e} outside the band {band}")));
    }
    Ok(())
}

/// Fixed point of `v = K'(t)u0 + K(t)u1 - c ∫_0^t K(t-τ) f(v(τ)) dτ` on the
/// uniform grid `t_m = mT/N_t`, starting from the free evolution.
pub fn picard_solve(
    u0: &Spectrum,
    u1: &Spectrum,
    nl: &NonlinearitySpec,
    cfg: &SolverConfig,
) -> Result<(TimeSeriesField, IterationReport)> {
    let start = Instant::now();
    cfg.validate()?;
    if u0.grid() != u1.grid() {
        return Err(Error::GridMismatch("u0 and u1 live on different grids".into()));
    }
    let grid = *u0.grid();
    let band = cfg.resolved_band(grid.n(), nl);
    if band == 0 {
        return Err(Error::InvalidParameter("band limit is zero on this lattice".into()));
    }
    check_data(u0, band, "u0")?;
    check_data(u1, band, "u1")?;
    let region = SupportRegion::IndexBox(band);
    let (u0, u1) = (project(u0, region), project(u1, region));
    let spec = PropagatorSpec::new(cfg.lambda)?;
    let times = uniform_times(cfg.horizon, cfg.steps)?;
    let free = linear_solve(&u0, &u1, None, &spec, &times)?;
    let map = Map {
        nl,
        spec,
        band,
        coefficient: cfg.coefficient(),
        free: free.clone(),
    };
    let (sigma, s) = cfg.monitor;
    let tail_check = |v: &TimeSeriesField, iteration: usize| -> Result<f64> {
        let top = worst_over(v, SupportRegion::IndexBox(band / 2));
        if top > TAIL_LIMIT {
            return Err(Error::SpectralTail { iteration, fraction: top });
        }
        Ok(top)
    };

    let mut v = free;
    let mut top = tail_check(&v, 0)?;
    let (mut next, mut tail) = map.apply(&v)?;
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut converged = false;
    for k in 1..=cfg.max_iter {
        let diff = relative_distance(&next, &v, sigma, s)?;
        if let Some(prev) = records.last_mut() {
            prev.residual = diff;
        }
        v = next;
        top = top.max(tail_check(&v, k)?);
        let (t_next, t_tail) = map.apply(&v)?;
        records.push(IterationRecord {
            iteration: k,
            successive_difference: diff,
            residual: f64::NAN,
            octant_leakage: worst_over(&v, SupportRegion::Octant),
            dealias_tail: tail,
            top_octave_mass: top,
        });
        next = t_next;
        tail = t_tail;
        if diff <= cfg.picard_tol {
            converged = true;
            break;
        }
    }
    let final_residual = relative_distance(&next, &v, sigma, s)?;
    if let Some(last) = records.last_mut() {
        last.residual = final_residual;
    }
    let n = records.len();
    let contraction_ratio = (n >= 2)
        .then(|| {
            let (a, b) = (records[n - 2].successive_difference, records[n - 1].successive_difference);
            (a > 0.0).then(|| b / a)
        })
        .flatten();
    let report = IterationReport {
        records,
        converged,
        iterations_used: n,
        final_residual,
        contraction_ratio,
        band,
        coefficient: map.coefficient,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((v, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridSpec;
    use crate::solver::data::gen_gaussian_octant;
    use std::f64::consts::PI;

    fn setup() -> (GridSpec, Spectrum, NonlinearitySpec, SolverConfig) {
        let g = GridSpec::new(1, 256, 16.0 * PI).unwrap();
        let nl = NonlinearitySpec::power(2, 1.0).unwrap();
        let band = band_limit(256, 2);
        let u0 = gen_gaussian_octant(&g, &[1.0], 0.125, 1e-2, Some(band)).unwrap();
        let cfg = SolverConfig::new(4.0, 2.0, 64);
        (g, u0, nl, cfg)
    }

    #[test]
    fn zero_data_converges_immediately() {
        let (g, _, nl, cfg) = setup();
        let z = Spectrum::zeros(g);
        let (v, r) = picard_solve(&z, &z, &nl, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations_used, 1);
        assert!(v.snapshots().iter().all(|s| s.max_abs() == 0.0));
    }

    #[test]
    fn zero_coefficient_returns_free_evolution() {
        let (_, u0, _, cfg) = setup();
        let nl = NonlinearitySpec::power(2, 0.0).unwrap();
        let u1 = u0.scaled(0.5);
        let (v, r) = picard_solve(&u0, &u1, &nl, &cfg).unwrap();
        assert!(r.converged && r.final_residual == 0.0);
        let spec = PropagatorSpec::new(cfg.lambda).unwrap();
        let free = linear_solve(&u0, &u1, None, &spec, v.times()).unwrap();
        assert!(relative_distance(&free, &v, 0.0, 0.0).unwrap() < 1e-15);
    }

    #[test]
    fn small_data_contracts() {
        let (_, u0, nl, cfg) = setup();
        let (_, r) = picard_solve(&u0, &u0.scaled(0.0), &nl, &cfg).unwrap();
        assert!(r.converged && r.iterations_used <= 8, "{r:?}");
        assert!(r.contraction_ratio.unwrap_or(0.0) < 0.5);
        assert!(r.records.iter().all(|x| x.octant_leakage < 1e-10));
        assert!(r.final_residual <= 2.0 * cfg.picard_tol);
        let diffs: Vec<f64> = r.records.iter().map(|x| x.successive_difference).collect();
        assert!(diffs.windows(2).skip(1).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn preconditions_are_checked() {
        let (g, u0, nl, cfg) = setup();
        let mut bad = u0.clone();
        bad.values_mut()[g.lattice_index(-3).unwrap()] = u0.values()[10];
        assert!(matches!(picard_solve(&bad, &u0, &nl, &cfg), Err(Error::Precondition(_))));
        let mut wide = u0.clone();
        wide.values_mut()[100] = u0.values()[10];
        assert!(matches!(picard_solve(&wide, &u0, &nl, &cfg), Err(Error::Precondition(_))));
        let mut short = cfg;
        short.steps = 4;
        assert!(picard_solve(&u0, &u0, &nl, &short).is_err());
    }

    #[test]
    fn large_data_trips_the_tail_monitor() {
        let (g, _, nl, cfg) = setup();
        let band = band_limit(256, 2);
        let u0 = gen_gaussian_octant(&g, &[3.0], 0.25, 40.0, Some(band)).unwrap();
        let res = picard_solve(&u0, &Spectrum::zeros(g), &nl, &cfg);
        assert!(matches!(res, Err(Error::SpectralTail { .. })), "{res:?}");
    }
}
