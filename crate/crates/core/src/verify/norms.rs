//! Partition of unity, norm identities, embeddings and scaling exponents.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Check, Comparison, Outcome, Tier};
use crate::error::Result;
use crate::lattice::{l1_norm, GridSpec, Spectrum, TimeSeriesField};
use crate::littlewood_paley::{max_block, smooth, BumpProfile};
use crate::solver::gen_gaussian_octant;
use crate::spaces::{
    besov_norm, bessel_norm, e_norm, embedding_probe, scaling_probe, space_time_scaling_probe, triebel_norm,
    Exponent, IndexSet, Norm, NormSpec, ScalingMode, TimeNormSpec,
};

const EXPONENTS: [Exponent; 4] = [
    Exponent::Finite(1.0),
    Exponent::Finite(2.0),
    Exponent::Finite(4.0),
    Exponent::Infinity,
];

pub(crate) fn random_spectrum(grid: GridSpec, rng: &mut ChaCha8Rng) -> Spectrum {
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Spectrum::new(grid, values).expect("length matches the grid")
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub(super) fn partition(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let profile = BumpProfile::STANDARD;
    out.param("n", 128);
    out.param("length", "2π");
    for d in 1..=3 {
        let grid = GridSpec::new(d, 128, 2.0 * PI)?;
        let top = max_block(&grid, &profile);
        let mut worst: f64 = 0.0;
        grid.for_each_frequency(|_, xi| {
            let r = l1_norm(xi);
            let sum: f64 = (0..=top).map(|j| profile.block_weight(j, r)).sum();
            worst = worst.max((sum - 1.0).abs());
        });
        out.push(Check::new(
            "max |ψ + Σφ_j - 1|",
            format!("d={d} J={top}"),
            worst,
            0.0,
            1e-12,
            Comparison::AtMost,
        ));
    }
    Ok(out)
}

/// Two-sided constant `max(r, 1/r)` of a norm ratio over a family.
fn two_sided(family: &[Spectrum], a: impl Fn(&Spectrum) -> f64, b: impl Fn(&Spectrum) -> f64) -> f64 {
    family
        .iter()
        .map(|f| {
            let r = a(f) / b(f);
            r.max(1.0 / r)
        })
        .fold(0.0, f64::max)
}

/// Random spectra with coefficients damped like `⟨ξ⟩^{-1}`.
fn damped_family(grid: GridSpec, count: usize, rng: &mut ChaCha8Rng) -> Vec<Spectrum> {
    (0..count)
        .map(|_| random_spectrum(grid, rng).multiply(|xi| 1.0 / crate::lattice::bracket(xi)))
        .collect()
}

const REFINEMENT_GROWTH: f64 = 1.5;

pub(super) fn l2_1(tier: Tier, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let count = if tier == Tier::Small { 20 } else { 60 };
    out.param("family", format!("{count} damped random spectra, d=1, L=2π"));
    for sigma in [-1.0, 0.5] {
        let s = -0.2;
        let spec = NormSpec::new(sigma, s, Exponent::Finite(2.0), Exponent::Finite(2.0))?;
        let mut constants = Vec::new();
        for n in [64, 128] {
            let fam = damped_family(GridSpec::new(1, n, 2.0 * PI)?, count, rng);
            let c = two_sided(&fam, |f| e_norm(f, sigma, s), |f| besov_norm(f, &spec, IndexSet::All));
            out.push(Check::new(
                "E vs B_{2,2} constant",
                format!("sigma={sigma} s={s} n={n}"),
                c,
                1.0,
                f64::MAX,
                Comparison::AtMost,
            ));
            constants.push(c);
        }
        out.push(Check::new(
            "E vs B_{2,2} constant growth under refinement",
            format!("sigma={sigma} s={s}"),
            constants[1] / constants[0],
            REFINEMENT_GROWTH,
            0.0,
            Comparison::AtMost,
        ));
    }
    Ok(out)
}

pub(super) fn l2_2(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (kappa, sigma, s) = (-3.0, 5.0, -0.5);
    let src = Norm::E { sigma: kappa, s: 0.0 };
    let dst = Norm::E { sigma, s };
    out.param("embedding", format!("H^{kappa} -> E^({sigma},{s})"));
    let mut constants = Vec::new();
    for n in [128, 256] {
        let g = GridSpec::new(1, n, 2.0 * PI)?;
        let fam: Vec<Spectrum> = (0..n)
            .map(|i| {
                let mut f = Spectrum::zeros(g);
                f.values_mut()[i] = Complex64::new(1.0, 0.0);
                f
            })
            .collect();
        let c = embedding_probe(&fam, &src, &dst);
        out.push(Check::new("single-mode stress constant", format!("n={n}"), c, 1.0, f64::MAX, Comparison::AtMost));
        constants.push(c);
        // Closed form per mode: ⟨ξ⟩^{σ-κ} 2^{s|ξ|}.
        let worst = fam
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let xi = g.wavevector(i)[0];
                let expect = (1.0 + xi * xi).powf((sigma - kappa) / 2.0) * (s * xi.abs()).exp2();
                rel(dst.eval(f) / src.eval(f), expect)
            })
            .fold(0.0, f64::max);
        out.push(Check::new("per-mode closed form", format!("n={n}"), worst, 0.0, 1e-12, Comparison::AtMost));
    }
    out.push(Check::new(
        "constant stable under refinement",
        "n=128->256",
        constants[1] / constants[0],
        1.0,
        1e-12,
        Comparison::Within,
    ));
    let g = GridSpec::new(1, 64, 2.0 * PI)?;
    let b = Norm::Besov(NormSpec::new(0.5, -0.3, Exponent::Finite(3.0), Exponent::Finite(2.0))?, IndexSet::All);
    let fam = vec![gen_gaussian_octant(&g, &[7.0], 1.0, 1.0, None)?];
    out.push(Check::new("src == dst constant", "B^(0.5,-0.3)_(3,2)", embedding_probe(&fam, &b, &b), 1.0, 1e-14, Comparison::Within));
    Ok(out)
}

pub(super) fn l2_3(tier: Tier, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (sigma, s, s_prime) = (0.5, -0.3, 0.2);
    out.param("sigma", sigma);
    out.param("s", s);
    out.param("s_prime", s_prime);
    out.param("samples", 50);
    let mut grids = vec![GridSpec::new(1, 32, 2.0 * PI)?];
    if tier == Tier::Full {
        grids.push(GridSpec::new(2, 16, 2.0 * PI)?);
    }
    for g in grids {
        let fam: Vec<Spectrum> = (0..50).map(|_| random_spectrum(g, rng)).collect();
        let shifted = fam.iter().map(|f| smooth(f, s_prime - s)).collect::<Result<Vec<_>>>()?;
        let e = fam
            .iter()
            .zip(&shifted)
            .map(|(f, h)| rel(e_norm(h, sigma, s), e_norm(f, sigma, s_prime)))
            .fold(0.0, f64::max);
        out.push(Check::new("E isometry", format!("d={}", g.dim()), e, 0.0, 1e-12, Comparison::AtMost));
        for p in EXPONENTS {
            for q in EXPONENTS {
                let a = NormSpec::new(sigma, s, p, q)?;
                let b = a.with_s(s_prime);
                let (mut wb, mut wf) = (0.0f64, 0.0f64);
                for (f, h) in fam.iter().zip(&shifted) {
                    wb = wb.max(rel(besov_norm(h, &a, IndexSet::All), besov_norm(f, &b, IndexSet::All)));
                    wf = wf.max(rel(triebel_norm(h, &a), triebel_norm(f, &b)));
                }
                let tag = format!("d={} p={p} q={q}", g.dim());
                out.push(Check::new("Besov isometry", tag.clone(), wb, 0.0, 1e-12, Comparison::AtMost));
                out.push(Check::new("Triebel isometry", tag, wf, 0.0, 1e-12, Comparison::AtMost));
            }
        }
    }
    Ok(out)
}

pub(crate) const SCALING_LAMBDAS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];
const SCALING_TOL: f64 = 0.15;

pub(super) fn l2_4_ii(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = GridSpec::new(1, 2048, 16.0 * PI)?;
    let (center, width) = (3.0, 0.125);
    let f = gen_gaussian_octant(&g, &[center], width, 1.0, None)?;
    let gap = center - 6.0 * width;
    out.param("data", format!("Gaussian octant packet at {center}, width {width}, gap {gap}"));
    out.param("lambdas", format!("{SCALING_LAMBDAS:?}"));
    for (sigma, s, p) in [(1.0, -0.5, 2.0), (1.0, -0.25, 4.0)] {
        let spec = NormSpec::new(sigma, s, Exponent::Finite(p), Exponent::Finite(2.0))?;
        let fit = scaling_probe(&f, &spec, &SCALING_LAMBDAS, ScalingMode::Contract { gap: Some(gap) })?;
        let tag = format!("sigma={sigma} s={s} p={p} q=2");
        out.push(Check::new(
            "contraction exponent",
            tag.clone(),
            fit.exponent,
            fit.reference_exponent,
            SCALING_TOL,
            Comparison::Within,
        ));
        out.push(Check::new(
            "exponential rate",
            tag.clone(),
            fit.rate.unwrap_or(f64::NAN),
            gap / 3.0,
            0.0,
            Comparison::AtLeast,
        ));
        out.note(format!(
            "{tag}: exponent after dividing out 2^(sλε0/3) = {:.4}",
            fit.literal_exponent.unwrap_or(f64::NAN)
        ));
    }
    Ok(out)
}

pub(super) fn l2_4_iii(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = GridSpec::new(1, 1024, 16.0 * PI)?;
    let f = gen_gaussian_octant(&g, &[40.0], 1.0, 1.0, None)?;
    out.param("data", "Gaussian octant packet at 40, width 1");
    out.param("lambdas", format!("{SCALING_LAMBDAS:?}"));
    for (sigma, s, p) in [(-1.0, -0.5, 2.0)] {
        let spec = NormSpec::new(sigma, s, Exponent::Finite(p), Exponent::Finite(2.0))?;
        let fit = scaling_probe(&f, &spec, &SCALING_LAMBDAS, ScalingMode::Dilate)?;
        out.push(Check::new(
            "dilation exponent",
            format!("sigma={sigma} s={s} p={p} q=2"),
            fit.exponent,
            fit.reference_exponent,
            SCALING_TOL,
            Comparison::Within,
        ));
    }
    Ok(out)
}

pub(super) fn l2_5(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = GridSpec::new(1, 512, 2.0 * PI)?;
    let mut f = Spectrum::zeros(g);
    f.values_mut()[200] = Complex64::new(1.0, 0.0);
    let times: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
    let u = TimeSeriesField::new(g, times.clone(), vec![f; 5])?;
    let (gamma, p) = (4.0, 3.0);
    out.param("data", "time-constant single mode at ξ = 200");
    out.param("gamma", gamma);
    out.param("p", p);
    // Dilation by λ is contraction by 1/λ.
    let inverse: Vec<f64> = SCALING_LAMBDAS.iter().map(|l| 1.0 / l).collect();
    for sigma in [-0.5, 0.5] {
        let space = NormSpec::new(sigma, 0.0, Exponent::Finite(p), Exponent::Finite(2.0))?;
        let spec = TimeNormSpec::trapezoid(Exponent::Finite(gamma), space, IndexSet::All, times.clone())?;
        let fit = space_time_scaling_probe(&u, &spec, &inverse)?;
        let bound = 1.0 / gamma + 1.0 / p - sigma.min(0.0);
        out.push(Check::new(
            "dilation growth exponent",
            format!("sigma={sigma}"),
            -fit.exponent,
            bound,
            SCALING_TOL,
            Comparison::AtMost,
        ));
    }
    Ok(out)
}

pub(super) fn l2_7(tier: Tier, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let count = if tier == Tier::Small { 10 } else { 40 };
    let g = GridSpec::new(1, 64, 2.0 * PI)?;
    let fam = damped_family(g, count, rng);
    out.param("family", format!("{count} damped random spectra, d=1, n=64"));
    let (sigma, s) = (0.5, -0.1);
    for p in EXPONENTS {
        for q in EXPONENTS {
            let f_spec = NormSpec::new(sigma, s, p, q)?;
            let lo = NormSpec::new(sigma, s, p, p.min(q))?;
            let hi = NormSpec::new(sigma, s, p, p.max(q))?;
            let (mut upper, mut lower) = (0.0f64, 0.0f64);
            for f in &fam {
                let t = triebel_norm(f, &f_spec);
                upper = upper.max(t / besov_norm(f, &lo, IndexSet::All));
                lower = lower.max(besov_norm(f, &hi, IndexSet::All) / t);
            }
            let tag = format!("p={p} q={q}");
            let tol = if p == q { 1e-10 } else { f64::MAX };
            out.push(Check::new("F / B_{p,p∧q}", tag.clone(), upper, 1.0, tol, Comparison::AtMost));
            out.push(Check::new("B_{p,p∨q} / F", tag, lower, 1.0, tol, Comparison::AtMost));
        }
    }
    Ok(out)
}

pub(super) fn l2_11(tier: Tier, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let count = if tier == Tier::Small { 10 } else { 40 };
    out.param("family", format!("{count} damped random spectra, d=1"));
    let (sigma, s) = (0.5, -0.2);
    for p in [1.5, 2.0, 4.0] {
        let spec = NormSpec::new(sigma, s, Exponent::Finite(p), Exponent::Finite(2.0))?;
        let mut constants = Vec::new();
        for n in [64, 128] {
            let fam = damped_family(GridSpec::new(1, n, 2.0 * PI)?, count, rng);
            let c = two_sided(&fam, |f| triebel_norm(f, &spec), |f| bessel_norm(f, sigma, s, Exponent::Finite(p)));
            out.push(Check::new("F_{p,2} vs H_p constant", format!("p={p} n={n}"), c, 1.0, f64::MAX, Comparison::AtMost));
            constants.push(c);
        }
        out.push(Check::new(
            "F_{p,2} vs H_p constant growth under refinement",
            format!("p={p}"),
            constants[1] / constants[0],
            REFINEMENT_GROWTH,
            0.0,
            Comparison::AtMost,
        ));
    }
    Ok(out)
}
