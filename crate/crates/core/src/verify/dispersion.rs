//! Kernel decay rates and the Strichartz exponent calculator.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Check, Comparison, Outcome, Tier};
use crate::error::{Error, Result};
use crate::lattice::{project, GridSpec, Spectrum, SupportRegion};
use crate::propagator::{decay_scan, strichartz_exponents, strichartz_sample, FineGridPolicy, PropagatorSpec};
use crate::spaces::{Exponent, IndexSet};

pub(crate) const DECAY_TOL: f64 = 0.1;

/// Nine log-spaced times in `[4, 64]`.
pub(crate) fn decay_times() -> Vec<f64> {
    (0..9).map(|i| 4.0 * 16f64.powf(i as f64 / 8.0)).collect()
}

fn scan_matrix(out: &mut Outcome, d: usize, cases: &[(f64, usize)]) -> Result<()> {
    let times = decay_times();
    out.param("times", "9 log-spaced in [4, 64]");
    out.param("d", d);
    for &(lambda, j) in cases {
        let policy = FineGridPolicy::auto(d, j, 64.0);
        let tag = format!("d={d} lambda={lambda} j={j} L={} n={}", policy.length, policy.n);
        match decay_scan(d, lambda, j, &times, policy) {
            Ok(r) => {
                let (lo, hi) = r.reference;
                let (reference, tolerance) = ((lo + hi) / 2.0, (hi - lo) / 2.0 + DECAY_TOL);
                out.push(Check::new(
                    format!("decay slope ({:?} regime)", r.regime),
                    tag,
                    r.slope,
                    reference,
                    tolerance,
                    Comparison::Within,
                ));
            }
            Err(Error::WrapAround { fraction, limit }) => {
                out.push(Check::new("wrap-around fraction", tag, fraction, limit, 0.0, Comparison::AtMost));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

pub(super) fn l3_2(_: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let cases: Vec<(f64, usize)> = [1.0, 4.0, 16.0]
        .iter()
        .flat_map(|&l| [0, 2, 5].map(|j| (l, j)))
        .collect();
    scan_matrix(&mut out, 1, &cases)?;
    Ok(out)
}

pub(super) fn l3_4(tier: Tier, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut cases = vec![(8.0, 1), (8.0, 5)];
    if tier == Tier::Full {
        cases.push((1.0, 3));
    }
    scan_matrix(&mut out, 2, &cases)?;
    Ok(out)
}

fn packet(g: GridSpec) -> Spectrum {
    let s = Spectrum::from_transform(g, |xi| {
        let r = xi[0] - 2.0;
        num_complex::Complex64::new((-r * r / (2.0 * 0.0625)).exp(), 0.0)
    });
    let half = g.length() / 2.0;
    project(&s, SupportRegion::Octant).multiply_complex(|xi| num_complex::Complex64::from_polar(1.0, -xi[0] * half))
}

pub(super) fn p3_6(tier: Tier, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d = rng.gen_range(1..=3);
        let p = if rng.gen_bool(0.05) {
            Exponent::Infinity
        } else {
            Exponent::Finite(rng.gen_range(2.0..100.0))
        };
        let theta = rng.gen_range(0.0..=1.0);
        worst = worst.max(strichartz_exponents(d, p, theta)?.relation_defect());
    }
    out.param("sweep", "1000 random (d, p, θ)");
    out.push(Check::new("relation defect", "sweep", worst, 0.0, 1e-14, Comparison::AtMost));
    let t = strichartz_exponents(2, Exponent::Finite(4.0), 1.0)?;
    out.push(Check::new("δ(4)", "d=2 theta=1", t.delta, 0.25, 1e-15, Comparison::Within));
    out.push(Check::new("σ(4)", "d=2 theta=1", t.sigma, 0.5, 1e-15, Comparison::Within));
    out.push(Check::new("γ(4)", "d=2 theta=1", t.gamma.value(), 4.0, 1e-14, Comparison::Within));
    for d in [2usize, 3] {
        let df = d as f64;
        let p = 2.0 * (df + 1.0) / (df - 1.0);
        let t = strichartz_exponents(d, Exponent::Finite(p), 0.0)?;
        let tag = format!("d={d} p={p}");
        out.push(Check::new("δ(p)", tag.clone(), t.delta, 1.0 / (df + 1.0), 1e-15, Comparison::Within));
        out.push(Check::new("σ1(p)", tag, t.sigma1, 0.5, 1e-15, Comparison::Within));
    }
    // Windowed Strichartz ratio: finite and stable under refinement.
    let table = strichartz_exponents(1, Exponent::Finite(6.0), 1.0)?;
    let spec = PropagatorSpec::new(4.0)?;
    let mut sizes = vec![512, 1024];
    if tier == Tier::Full {
        sizes.push(2048);
    }
    let mut constants = Vec::new();
    for &n in &sizes {
        let g = GridSpec::new(1, n, 160.0)?;
        let c = strichartz_sample(&[packet(g)], &spec, &table, IndexSet::Zlambda(4.0), 0.5, -0.2, 32.0, 64)?.constant;
        out.push(Check::new("windowed Strichartz constant", format!("n={n}"), c, 1.0, f64::MAX, Comparison::AtMost));
        constants.push(c);
    }
    for w in constants.windows(2) {
        out.push(Check::new(
            "windowed constant refinement ratio",
            "n -> 2n",
            w[1] / w[0],
            1.0,
            0.2,
            Comparison::Within,
        ));
    }
    Ok(out)
}
