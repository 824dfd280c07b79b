//! Klein–Gordon propagators with mass `λ`: `U_λ(t) = e^{itω}`,
//! `K_λ(t) = sin(tω)/ω`, `K'_λ(t) = cos(tω)` with `ω = (λ² + |ξ|²)^{1/2}`
//! (Euclidean), the Duhamel operators, decay scans and Strichartz exponents.

mod decay;
mod exponents;

pub use decay::{decay_scan, strichartz_sample, DecayScanReport, FineGridPolicy, Regime, StrichartzSample, WRAP_LIMIT};
pub use exponents::{critical_index, strichartz_exponents, theorem_exponent, ExponentTable, TheoremCase};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{l2_norm, Spectrum, TimeSeriesField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropagatorSpec {
    lambda: f64,
}

impl PropagatorSpec {
    /// `λ >= 1`; `λ = 1` is the unscaled equation.
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 1.0) {
            return Err(Error::InvalidParameter(format!("mass λ = {lambda} must be >= 1")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega(&self, xi: &[f64]) -> f64 {
        self.lambda.hypot(l2_norm(xi))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time {t} is not finite")))
    }
}

/// `U_λ(t) F`.
pub fn half_wave(f: &Spectrum, spec: &PropagatorSpec, t: f64) -> Result<Spectrum> {
    check_time(t)?;
    Ok(f.multiply_complex(|xi| Complex64::from_polar(1.0, t * spec.omega(xi))))
}

/// `K_λ(t) F`.
pub fn sine_kernel(f: &Spectrum, spec: &PropagatorSpec, t: f64) -> Result<Spectrum> {
    check_time(t)?;
    Ok(f.multiply(|xi| {
        let w = spec.omega(xi);
        (t * w).sin() / w
    }))
}

/// `K'_λ(t) F`.
pub fn cosine_kernel(f: &Spectrum, spec: &PropagatorSpec, t: f64) -> Result<Spectrum> {
    check_time(t)?;
    Ok(f.multiply(|xi| (t * spec.omega(xi)).cos()))
}

/// Multiplier `ω`.
pub fn omega_op(f: &Spectrum, spec: &PropagatorSpec) -> Spectrum {
    f.multiply(|xi| spec.omega(xi))
}

/// Trapezoid values of `∫_0^{t_n} K_λ(t_n - τ) f(τ) dτ` at every node of
/// `f`, whose first time must be 0. Cost is linear in the number of nodes:
/// `K(t-τ) = (e^{itω}e^{-iτω} - e^{-itω}e^{iτω}) / (2iω)` with running sums.
pub fn sine_duhamel_series(f: &TimeSeriesField, spec: &PropagatorSpec) -> Result<TimeSeriesField> {
    let times = f.times();
    if times[0] != 0.0 {
        return Err(Error::InvalidParameter("Duhamel time grid must start at 0".into()));
    }
    let grid = *f.grid();
    let omegas = grid.frequency_map(|xi| spec.omega(xi));
    let len = grid.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut acc_minus = vec![zero; len];
    let mut acc_plus = vec![zero; len];
    let mut prev_minus = vec![zero; len];
    let mut prev_plus = vec![zero; len];
    let mut out = Vec::with_capacity(times.len());
    for (m, (&t, fm)) in times.iter().zip(f.snapshots()).enumerate() {
        let h = if m == 0 { 0.0 } else { t - times[m - 1] };
        let mut snap = vec![zero; len];
        for i in 0..len {
            let w = omegas[i];
            let e = Complex64::from_polar(1.0, t * w);
            let cur_minus = e.conj() * fm.values()[i];
            let cur_plus = e * fm.values()[i];
            acc_minus[i] += 0.5 * h * (prev_minus[i] + cur_minus);
            acc_plus[i] += 0.5 * h * (prev_plus[i] + cur_plus);
            prev_minus[i] = cur_minus;
            prev_plus[i] = cur_plus;
            snap[i] = (e * acc_minus[i] - e.conj() * acc_plus[i]) / Complex64::new(0.0, 2.0 * w);
        }
        out.push(Spectrum::new(grid, snap)?);
    }
    TimeSeriesField::new(grid, times.to_vec(), out)
}

/// `A_λ f(t) = ∫_0^t U_λ(t-τ) f(τ) dτ` by the trapezoid rule on the nodes of
/// `f` (first node 0), with `f` linearly interpolated on a partial last panel.
pub fn duhamel(f: &TimeSeriesField, spec: &PropagatorSpec, t: f64) -> Result<Spectrum> {
    check_time(t)?;
    let times = f.times();
    if times[0] != 0.0 {
        return Err(Error::InvalidParameter("Duhamel time grid must start at 0".into()));
    }
    let last = *times.last().expect("nonempty series");
    if t < 0.0 || t > last {
        return Err(Error::InvalidParameter(format!("t = {t} outside [0, {last}]")));
    }
    let grid = *f.grid();
    let mut acc = Spectrum::zeros(grid);
    let mut add = |g: &Spectrum, tau: f64, w: f64| -> Result<()> {
        let u = half_wave(g, spec, t - tau)?;
        for (a, b) in acc.values_mut().iter_mut().zip(u.values()) {
            *a += w * b;
        }
        Ok(())
    };
    for m in 1..times.len() {
        let (a, b) = (times[m - 1], times[m]);
        if a >= t {
            break;
        }
        if b <= t {
            add(&f.snapshots()[m - 1], a, 0.5 * (b - a))?;
            add(&f.snapshots()[m], b, 0.5 * (b - a))?;
        } else {
            let r = (t - a) / (b - a);
            let ft = f.snapshots()[m - 1]
                .scaled(1.0 - r)
                .add(&f.snapshots()[m].scaled(r))?;
            add(&f.snapshots()[m - 1], a, 0.5 * (t - a))?;
            add(&ft, t, 0.5 * (t - a))?;
        }
    }
    Ok(acc)
}

/// Solution of `∂²u + λ²u - Δu = f`, `u(0) = u0`, `∂_t u(0) = u1` at `times`.
/// A forcing series must share those times, starting at 0.
pub fn linear_solve(
    u0: &Spectrum,
    u1: &Spectrum,
    forcing: Option<&TimeSeriesField>,
    spec: &PropagatorSpec,
    times: &[f64],
) -> Result<TimeSeriesField> {
    if u0.grid() != u1.grid() {
        return Err(Error::GridMismatch("u0 and u1 live on different grids".into()));
    }
    let grid = *u0.grid();
    let mut snaps = Vec::with_capacity(times.len());
    for &t in times {
        snaps.push(cosine_kernel(u0, spec, t)?.add(&sine_kernel(u1, spec, t)?)?);
    }
    let free = TimeSeriesField::new(grid, times.to_vec(), snaps)?;
    match forcing {
        None => Ok(free),
        Some(f) => {
            if f.times() != times || f.grid() != &grid {
                return Err(Error::InvalidParameter("forcing must share the output grid and times".into()));
            }
            let d = sine_duhamel_series(f, spec)?;
            let snaps = free
                .snapshots()
                .iter()
                .zip(d.snapshots())
                .map(|(a, b)| a.add(b))
                .collect::<Result<Vec<_>>>()?;
            TimeSeriesField::new(grid, times.to_vec(), snaps)
        }
    }
}

/// Uniform nodes `t_m = mT/N`, `m = 0..=N`.
pub fn uniform_times(horizon: f64, steps: usize) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) || steps == 0 {
        return Err(Error::InvalidParameter(format!("bad time grid T = {horizon}, N = {steps}")));
    }
    Ok((0..=steps).map(|m| horizon * m as f64 / steps as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridSpec;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn data(g: GridSpec) -> Spectrum {
        Spectrum::from_fn(g, |xi| Complex64::new((-0.1 * xi[0] * xi[0]).exp(), 0.3 * xi[0].sin()))
    }

    fn rel(a: &Spectrum, b: &Spectrum) -> f64 {
        a.sub(b).unwrap().l2_sum() / b.l2_sum().max(1e-300)
    }

    #[test]
    fn rejects_light_mass() {
        assert!(PropagatorSpec::new(0.5).is_err());
        let s = PropagatorSpec::new(1.0).unwrap();
        let f = Spectrum::zeros(GridSpec::new(1, 8, 1.0).unwrap());
        assert!(half_wave(&f, &s, f64::NAN).is_err());
    }

    #[test]
    fn half_wave_at_zero_is_identity() {
        let g = GridSpec::new(2, 16, 4.0).unwrap();
        let f = data(g);
        let spec = PropagatorSpec::new(3.0).unwrap();
        assert_eq!(half_wave(&f, &spec, 0.0).unwrap(), f);
    }

    #[test]
    fn unit_mass_zero_mode_frequency() {
        let g = GridSpec::new(1, 8, 2.0 * PI).unwrap();
        let mut f = Spectrum::zeros(g);
        f.values_mut()[0] = Complex64::new(1.0, 0.0);
        let u = half_wave(&f, &PropagatorSpec::new(1.0).unwrap(), PI).unwrap();
        assert!((u.values()[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn group_law_and_unitarity(t in -20.0f64..20.0, s in -20.0f64..20.0, lam in 1.0f64..16.0) {
            let g = GridSpec::new(1, 32, 7.0).unwrap();
            let f = data(g);
            let spec = PropagatorSpec::new(lam).unwrap();
            let a = half_wave(&half_wave(&f, &spec, t).unwrap(), &spec, s).unwrap();
            let b = half_wave(&f, &spec, t + s).unwrap();
            prop_assert!(rel(&a, &b) < 1e-12);
            let n = half_wave(&f, &spec, t).unwrap().l2_sum();
            prop_assert!((n - f.l2_sum()).abs() / f.l2_sum() < 1e-12);
        }

        #[test]
        fn kernel_identities(t in -20.0f64..20.0, lam in 1.0f64..16.0) {
            let g = GridSpec::new(1, 32, 7.0).unwrap();
            let f = data(g);
            let spec = PropagatorSpec::new(lam).unwrap();
            let k = sine_kernel(&f, &spec, t).unwrap();
            let kp = cosine_kernel(&f, &spec, t).unwrap();
            // K' = (U(t) + U(-t))/2 and ωK = (U(t) - U(-t))/(2i).
            let up = half_wave(&f, &spec, t).unwrap();
            let um = half_wave(&f, &spec, -t).unwrap();
            let kp2 = up.add(&um).unwrap().scaled(0.5);
            prop_assert!(rel(&kp, &kp2) < 1e-12 || kp.l2_sum() < 1e-12 * f.l2_sum());
            let wk = omega_op(&k, &spec);
            let wk2 = up.sub(&um).unwrap().multiply_complex(|_| Complex64::new(0.0, -0.5));
            prop_assert!(wk.sub(&wk2).unwrap().l2_sum() < 1e-12 * f.l2_sum());
            // Energy: ‖K'F‖² + ‖ωKF‖² = ‖F‖².
            let e = kp.l2_sum().powi(2) + wk.l2_sum().powi(2);
            prop_assert!((e - f.l2_sum().powi(2)).abs() < 1e-12 * f.l2_sum().powi(2));
        }
    }

    /// Closed form of `∫_0^t sin((t-τ)ω)/ω e^{iντ} dτ`.
    fn forced_oracle(t: f64, w: f64, nu: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let part = |a: f64| -> Complex64 {
            // ∫_0^t e^{iaτ} dτ
            if a == 0.0 {
                Complex64::new(t, 0.0)
            } else {
                ((i * a * t).exp() - 1.0) / (i * a)
            }
        };
        let e = (i * w * t).exp();
        (e * part(nu - w) - e.conj() * part(nu + w)) / (2.0 * i * w)
    }

    #[test]
    fn duhamel_series_second_order() {
        let g = GridSpec::new(1, 8, 2.0 * PI).unwrap();
        let spec = PropagatorSpec::new(2.0).unwrap();
        let nu = 1.3;
        let horizon = 3.0;
        let err = |steps: usize| -> f64 {
            let times = uniform_times(horizon, steps).unwrap();
            let snaps: Vec<Spectrum> = times
                .iter()
                .map(|&t| Spectrum::from_fn(g, |_| Complex64::from_polar(1.0, nu * t)))
                .collect();
            let f = TimeSeriesField::new(g, times.clone(), snaps).unwrap();
            let d = sine_duhamel_series(&f, &spec).unwrap();
            let mut worst: f64 = 0.0;
            for (t, s) in times.iter().zip(d.snapshots()) {
                g.for_each_frequency(|i, xi| {
                    let exact = forced_oracle(*t, spec.omega(xi), nu);
                    worst = worst.max((s.values()[i] - exact).norm());
                });
            }
            worst
        };
        let (e1, e2) = (err(64), err(128));
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.8, "{e1} {e2} {ratio}");
    }

    #[test]
    fn duhamel_endpoints() {
        let g = GridSpec::new(1, 8, 2.0 * PI).unwrap();
        let spec = PropagatorSpec::new(1.0).unwrap();
        let times = uniform_times(1.0, 16).unwrap();
        let f = TimeSeriesField::new(g, times.clone(), vec![data(g); 17]).unwrap();
        assert_eq!(duhamel(&f, &spec, 0.0).unwrap().max_abs(), 0.0);
        assert!(duhamel(&f, &spec, 1.5).is_err());
        // Constant forcing: ∫_0^t e^{i(t-τ)ω} dτ = (e^{itω} - 1)/(iω).
        let t = 0.53;
        let a = duhamel(&f, &spec, t).unwrap();
        let exact = data(g).multiply_complex(|xi| {
            let w = spec.omega(xi);
            (Complex64::from_polar(1.0, t * w) - 1.0) / Complex64::new(0.0, w)
        });
        assert!(rel(&a, &exact) < 2e-3);
    }

    #[test]
    fn linear_solve_matches_kernels_and_is_linear() {
        let g = GridSpec::new(2, 8, 3.0).unwrap();
        let spec = PropagatorSpec::new(1.5).unwrap();
        let u0 = data(g);
        let u1 = data(g).scaled(0.25);
        let times = uniform_times(2.0, 4).unwrap();
        let u = linear_solve(&u0, &u1, None, &spec, &times).unwrap();
        let t = times[3];
        let direct = cosine_kernel(&u0, &spec, t).unwrap().add(&sine_kernel(&u1, &spec, t).unwrap()).unwrap();
        assert!(rel(&u.snapshots()[3], &direct) < 1e-15);
        let zero = Spectrum::zeros(g);
        let z = linear_solve(&zero, &zero, None, &spec, &times).unwrap();
        assert!(z.snapshots().iter().all(|s| s.max_abs() == 0.0));
    }
}
