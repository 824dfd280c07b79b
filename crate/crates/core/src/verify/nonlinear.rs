//! Lemma-level checks of the nonlinear solver and the data families.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use super::{Check, Comparison, Outcome, Tier};
use crate::error::Result;
use crate::lattice::{inverse, project, support_mass_outside, GridSpec, Spectrum, SupportRegion, TimeSeriesField};
use crate::littlewood_paley::smooth;
use crate::solver::{
    band_limit, dealiased_product, gen_concentrating, gen_gaussian_octant, gen_sokhotski_plemelj, pde_residual,
    picard_solve, relative_distance, scale_solution, Direction, IterationReport, NonlinearScaling, NonlinearityKind,
    NonlinearitySpec, SolverConfig,
};
use crate::spaces::{e_norm, sobolev_norm};

pub(super) fn l4_1(tier: Tier, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let trials = if tier == Tier::Small { 5 } else { 20 };
    out.param("trials", trials);
    out.param("s", "-0.5, 0.3");
    for d in [1usize, 2] {
        let n = if d == 1 { 64 } else { 32 };
        let g = GridSpec::new(d, n, 2.0 * PI)?;
        for alpha in 1..=3u32 {
            let band = band_limit(n, alpha);
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let factors: Vec<Spectrum> = (0..=alpha)
                    .map(|_| project(&super::norms::random_spectrum(g, rng), SupportRegion::OctantBox(band)))
                    .collect();
                for s in [-0.5, 0.3] {
                    let lhs = smooth(&dealiased_product(&factors, band)?, s)?;
                    let smoothed = factors.iter().map(|f| smooth(f, s)).collect::<Result<Vec<_>>>()?;
                    let rhs = dealiased_product(&smoothed, band)?;
                    worst = worst.max(lhs.sub(&rhs)?.max_abs() / lhs.max_abs());
                }
            }
            out.push(Check::new(
                "max relative discrepancy",
                format!("d={d} alpha={alpha} n={n} band={band}"),
                worst,
                0.0,
                1e-10,
                Comparison::AtMost,
            ));
        }
    }
    Ok(out)
}

/// Data and configuration of the cubic reference run.
pub(crate) struct CubicRun {
    pub u0: Spectrum,
    pub nl: NonlinearitySpec,
    pub cfg: SolverConfig,
}

pub(crate) fn cubic_run(steps: usize) -> Result<CubicRun> {
    let g = GridSpec::new(1, 256, 16.0 * PI)?;
    let nl = NonlinearitySpec::power(2, 1.0)?;
    let u0 = gen_gaussian_octant(&g, &[1.0], 0.125, 1e-2, Some(band_limit(256, 2)))?;
    Ok(CubicRun {
        u0,
        nl,
        cfg: SolverConfig::new(4.0, 2.0, steps),
    })
}

fn solve(run: &CubicRun, u0: &Spectrum) -> Result<(TimeSeriesField, IterationReport)> {
    picard_solve(u0, &Spectrum::zeros(*u0.grid()), &run.nl, &run.cfg)
}

/// `fine` restricted to the nodes of `coarse` (every other node).
fn restrict(fine: &TimeSeriesField, coarse: &TimeSeriesField) -> Result<TimeSeriesField> {
    let snaps = (0..coarse.len()).map(|m| fine.snapshots()[2 * m].clone()).collect();
    TimeSeriesField::new(*fine.grid(), coarse.times().to_vec(), snaps)
}

pub(crate) const ORDER_BAND: (f64, f64) = (3.2, 4.8);

pub(super) fn t1_1_picard(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut sols = Vec::new();
    for steps in [128usize, 256, 512] {
        let run = cubic_run(steps)?;
        sols.push(solve(&run, &run.u0)?);
    }
    let base = cubic_run(128)?;
    let tol = base.cfg.picard_tol;
    out.param("d", 1);
    out.param("alpha", 2);
    out.param("n", 256);
    out.param("length", "16π");
    out.param("lambda", base.cfg.lambda);
    out.param("horizon", base.cfg.horizon);
    out.param("steps", "128 (order check 256, 512)");
    out.param("data", "Gaussian octant at ξ = 1, width 0.125, amplitude 1e-2");
    let (v, rep) = &sols[0];
    out.push(Check::flag("converged", "N_t=128", rep.converged));
    out.push(Check::new("iterations used", "N_t=128", rep.iterations_used as f64, 8.0, 0.0, Comparison::AtMost));
    out.push(Check::new(
        "contraction ratio",
        "N_t=128",
        rep.contraction_ratio.unwrap_or(0.0),
        0.5,
        0.0,
        Comparison::AtMost,
    ));
    out.push(Check::new("fixed-point residual", "N_t=128", rep.final_residual, 2.0 * tol, 0.0, Comparison::AtMost));
    let leak = v
        .snapshots()
        .iter()
        .map(|s| support_mass_outside(s, SupportRegion::Octant))
        .chain(rep.records.iter().map(|r| r.octant_leakage))
        .fold(0.0, f64::max);
    out.push(Check::new("octant leakage", "all snapshots and iterates", leak, 1e-10, 0.0, Comparison::AtMost));
    let (sigma, s) = base.cfg.monitor;
    let e1 = relative_distance(&restrict(&sols[1].0, v)?, v, sigma, s)?;
    let e2 = relative_distance(&restrict(&sols[2].0, &sols[1].0)?, &sols[1].0, sigma, s)?;
    out.push(Check::new(
        "double-resolution residual",
        "N_t=128 vs 256",
        e1,
        4.0 * tol,
        0.0,
        Comparison::AtMost,
    ));
    let (lo, hi) = ORDER_BAND;
    out.push(Check::new(
        "residual ratio under dt halving",
        "N_t=128/256/512",
        e1 / e2,
        (lo + hi) / 2.0,
        (hi - lo) / 2.0,
        Comparison::Within,
    ));
    Ok(out)
}

pub(super) fn t1_1_smoothing(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let run = cubic_run(128)?;
    let s = -0.5;
    out.param("s", s);
    out.param("configuration", "cubic reference run, N_t = 128");
    let (v, _) = solve(&run, &run.u0)?;
    let after = v.map_snapshots(|f| smooth(f, s).expect("moderate weight"))?;
    let (w, rep) = solve(&run, &smooth(&run.u0, s)?)?;
    let (sigma, s_mon) = run.cfg.monitor;
    out.push(Check::flag("smoothed run converged", "", rep.converged));
    out.push(Check::new(
        "solve∘smooth vs smooth∘solve",
        format!("s={s}"),
        relative_distance(&after, &w, sigma, s_mon)?,
        4.0 * run.cfg.picard_tol,
        0.0,
        Comparison::AtMost,
    ));
    Ok(out)
}

pub(super) fn t1_1_scaling(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    out.param("configuration", "cubic reference run, mapped back with λ = 4");
    let mut residuals = Vec::new();
    for steps in [128, 256] {
        let run = cubic_run(steps)?;
        let band = run.cfg.resolved_band(run.u0.grid().n(), &run.nl);
        let (v, _) = solve(&run, &run.u0)?;
        let scaled = pde_residual(&v, &run.nl, run.cfg.lambda, run.cfg.coefficient(), band)?;
        let u = scale_solution(&v, run.cfg.lambda, Some(2), Direction::Back)?;
        let unscaled = pde_residual(&u, &run.nl, 1.0, 1.0, band)?;
        let tag = format!("N_t={steps}");
        out.push(Check::new(
            "unscaled / scaled residual",
            tag.clone(),
            unscaled / scaled,
            1.25,
            0.75,
            Comparison::Within,
        ));
        out.note(format!("{tag}: residual scaled {scaled:.4e}, mapped back {unscaled:.4e}"));
        residuals.push(unscaled);
    }
    let (lo, hi) = ORDER_BAND;
    out.push(Check::new(
        "unscaled residual ratio under dt halving",
        "N_t=128/256",
        residuals[0] / residuals[1],
        (lo + hi) / 2.0,
        (hi - lo) / 2.0,
        Comparison::Within,
    ));
    Ok(out)
}

/// `sup_t Σ_k |ĉ_k|`, the absolutely convergent Fourier-series norm bounding
/// `sup_{t,x} |v|`.
pub(crate) fn wiener_norm(u: &TimeSeriesField) -> f64 {
    let scale = (u.grid().len() as f64).sqrt();
    u.snapshots()
        .iter()
        .map(|s| s.values().iter().map(|c| c.norm()).sum::<f64>() / scale)
        .fold(0.0, f64::max)
}

fn sup_abs(u: &TimeSeriesField) -> f64 {
    u.snapshots().iter().map(|s| inverse(s).max_abs()).fold(0.0, f64::max)
}

pub(super) fn t1_2_sinh(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (n, length, lambda, horizon, steps) = (128usize, 16.0 * PI, 8.0, 2.0, 64usize);
    let g = GridSpec::new(2, n, length)?;
    let u0 = gen_gaussian_octant(&g, &[0.125, 0.125], 0.02, 10.0, None)?;
    let u1 = Spectrum::zeros(g);
    out.param("d", 2);
    out.param("n", n);
    out.param("length", "16π");
    out.param("lambda", lambda);
    out.param("horizon", horizon);
    out.param("steps", steps);
    out.param("variant", "mass-squared");
    out.param("data", "Gaussian octant at (0.125, 0.125), width 0.02, amplitude 10");
    let ratios = NonlinearitySpec::new(NonlinearityKind::SinhMinusU, 1.0, 6)?.coefficient_ratios();
    out.push(Check::flag(
        "Taylor coefficient ratios decrease",
        "sinh, 6 terms",
        ratios.windows(2).all(|w| w[1] < w[0]),
    ));
    for terms in [1usize, 2] {
        let a = NonlinearitySpec::new(NonlinearityKind::SinhMinusU, 1.0, terms)?;
        let b = NonlinearitySpec::new(NonlinearityKind::SinhMinusU, 1.0, terms + 1)?;
        let mut cfg = SolverConfig::new(lambda, horizon, steps);
        cfg.scaling = NonlinearScaling::MassSquared;
        cfg.band = Some(band_limit(n, b.effective_alpha()));
        let (va, ra) = picard_solve(&u0, &u1, &a, &cfg)?;
        let (vb, rb) = picard_solve(&u0, &u1, &b, &cfg)?;
        let tag = format!("taylor_terms={terms}");
        out.push(Check::flag("both runs converged", tag.clone(), ra.converged && rb.converged));
        let change = sup_abs(&va.sub(&vb)?);
        let vmax = sup_abs(&va);
        // The omitted term acts as a forcing through the Duhamel integral.
        let reach = (horizon * horizon / 2.0).min(horizon / lambda);
        let bound = cfg.coefficient() * reach * a.next_term_bound(wiener_norm(&va));
        out.push(Check::new(
            "pointwise change / Duhamel next-term bound",
            tag.clone(),
            change / bound,
            1.0,
            0.0,
            Comparison::AtMost,
        ));
        out.note(format!(
            "{tag}: change {change:.3e}, sup|v| {vmax:.3e}, sup|v|^(m+2)/(m+2)! = {:.3e} (ratio {:.3})",
            a.next_term_bound(vmax),
            change / a.next_term_bound(vmax)
        ));
    }
    Ok(out)
}

pub(super) fn l5_1(tier: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = GridSpec::new(1, 256, 2.0 * PI * 64.0)?;
    let ks = [4u32, 8, 16];
    out.param("ks", format!("{ks:?}"));
    out.param("grid", "d=1, n=256, L=128π");
    let family = ks.iter().map(|&k| gen_concentrating(&g, k)).collect::<Result<Vec<_>>>()?;
    let l2: Vec<f64> = family.iter().map(|f| e_norm(f, 0.0, 0.0)).collect();
    let sigmas: &[f64] = if tier == Tier::Small { &[0.0, 1.0, -1.0] } else { &[0.0, 1.0, -1.0, 2.0, -2.0] };
    for &sigma in sigmas {
        for b in [-8.0, -16.0] {
            let c = family
                .iter()
                .zip(&ks)
                .zip(&l2)
                .map(|((f, &k), n2)| e_norm(f, sigma, b) / ((b / k as f64).exp2() * n2))
                .fold(f64::INFINITY, f64::min);
            // On |ξ| <= 1/k the weights are at least 2^{b/k} ⟨1/k⟩^{min(σ,0)}.
            let floor = (1.0 + 1.0 / 16.0f64).powf(sigma.min(0.0) / 2.0);
            out.push(Check::new(
                "k-uniform lower constant",
                format!("sigma={sigma} b={b}"),
                c,
                floor,
                1e-12,
                Comparison::AtLeast,
            ));
        }
        let h = family
            .iter()
            .map(|f| (e_norm(f, sigma, 0.0) - sobolev_norm(f, sigma)).abs() / sobolev_norm(f, sigma))
            .fold(0.0, f64::max);
        out.push(Check::new("b = 0 equals H^σ", format!("sigma={sigma}"), h, 0.0, 1e-10, Comparison::AtMost));
    }
    let upper = family
        .iter()
        .zip(&l2)
        .flat_map(|(f, n2)| [(0.0, -0.5), (-1.0, -0.5)].map(|(sg, s)| e_norm(f, sg, s) / n2))
        .fold(0.0, f64::max);
    out.push(Check::new("‖φ_k‖_E / ‖φ_k‖_2", "sigma<=0, s=-0.5", upper, 1.0, 1e-12, Comparison::AtMost));
    let spread = l2.iter().copied().fold(0.0, f64::max) / l2.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(Check::new("‖φ_k‖_2 spread over k", "k=4,8,16", spread, 1.5, 0.0, Comparison::AtMost));
    Ok(out)
}

pub(super) fn r1_3_iii(tier: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (s, rate, eps) = (-1.0, 0.3, 1.0);
    out.param("s", s);
    out.param("series_rate", rate);
    out.param("eps", eps);
    out.param("length", "2π");
    let mut sizes = vec![64usize, 128];
    if tier == Tier::Full {
        sizes.extend([256, 512]);
    }
    let mut e = Vec::new();
    let mut h = Vec::new();
    for &n in &sizes {
        let g = GridSpec::new(1, n, 2.0 * PI)?;
        let sp = gen_sokhotski_plemelj(&g, 0, eps, Some(rate), s)?;
        e.push(e_norm(&sp.spectrum, 0.0, s));
        h.push(e_norm(&sp.spectrum, 0.0, 0.0));
        out.note(format!("n={n}: weighted tail fraction beyond Nyquist {:.3e}", sp.tail_fraction));
    }
    for i in 1..sizes.len() {
        let tag = format!("n={}->{}", sizes[i - 1], sizes[i]);
        out.push(Check::new("E^(0,s) change", tag.clone(), e[i] / e[i - 1], 1.0, 0.01, Comparison::Within));
        out.push(Check::new("H^0 growth", tag, h[i] / h[i - 1], 2.0, 0.0, Comparison::AtLeast));
    }
    // Single-order profile k = 0: a Heaviside step in frequency.
    let g = GridSpec::new(1, 64, 2.0 * PI)?;
    let step = gen_sokhotski_plemelj(&g, 0, 2.0, None, s)?.spectrum;
    let height = (64f64).sqrt() / (2.0 * PI);
    let worst = (0..64)
        .map(|i| {
            let k = g.freq_index(i);
            let expect = if k >= 2 { height } else { 0.0 };
            (step.values()[i] - Complex64::new(expect, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("Heaviside profile", "k=0 eps=2 n=64", worst, 0.0, 1e-14, Comparison::AtMost));
    Ok(out)
}
