//! Discrete Besov, Triebel–Lizorkin, Bessel-potential and `E^{σ,s}` norms with
//! the exponential weight `2^{s|ξ|}`, and Chemin–Lerner time-space norms.

mod probe;

pub use probe::{
    embedding_probe, scaling_probe, space_time_scaling_probe, ScalingFit, ScalingMode,
};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{bracket, inverse, l1_norm, Field, Spectrum, TimeSeriesField};
use crate::littlewood_paley::{self as lp, BumpProfile};

/// Integrability exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!("exponent {p} not in [1, inf]")))
        }
    }

    /// Exponent in `(0, ∞]`, used for time integrability indices.
    pub fn positive(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!("exponent {p} not in (0, inf]")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, zero at infinity.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self.value() <= other.value() {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.value() >= other.value() {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse exponent '{t}'")))?;
                Exponent::new(p)
            }
        }
    }
}

/// `(σ, s, p, q)` of `B^{σ,s}_{p,q}` or `F^{σ,s}_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormSpec {
    pub sigma: f64,
    pub s: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl NormSpec {
    pub fn new(sigma: f64, s: f64, p: Exponent, q: Exponent) -> Result<Self> {
        if !sigma.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameter("σ and s must be finite".into()));
        }
        Ok(Self { sigma, s, p, q })
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }
}

/// Dyadic index sets `Z_λ = {j : 2^j <= λ}` and its complement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum IndexSet {
    All,
    Zlambda(f64),
    ZlambdaC(f64),
}

impl IndexSet {
    pub fn zlambda(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(IndexSet::Zlambda(lambda))
    }

    pub fn zlambda_c(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(IndexSet::ZlambdaC(lambda))
    }

    pub fn contains(&self, j: usize) -> bool {
        match *self {
            IndexSet::All => true,
            IndexSet::Zlambda(l) => 2f64.powi(j as i32) <= l,
            IndexSet::ZlambdaC(l) => 2f64.powi(j as i32) > l,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("λ = {lambda} must be >= 1")))
    }
}

/// `(Σ v^q)^{1/q}` or `max v`, rescaled to avoid overflow.
pub(crate) fn lq_sum(values: &[f64], q: Exponent) -> f64 {
    let m = values.iter().copied().fold(0.0, f64::max);
    match q {
        Exponent::Infinity => m,
        Exponent::Finite(q) => {
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            m * values.iter().map(|v| (v / m).powf(q)).sum::<f64>().powf(1.0 / q)
        }
    }
}

/// `(Σ w_i v_i^q)^{1/q}` or `max v`.
pub(crate) fn weighted_lq(values: &[f64], weights: &[f64], q: Exponent) -> f64 {
    let m = values.iter().copied().fold(0.0, f64::max);
    match q {
        Exponent::Infinity => m,
        Exponent::Finite(q) => {
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            m * values
                .iter()
                .zip(weights)
                .map(|(v, w)| w * (v / m).powf(q))
                .sum::<f64>()
                .powf(1.0 / q)
        }
    }
}

/// Discrete `L^p` norm with quadrature weight `(L/n)^d`.
pub fn lp_norm(f: &Field, p: Exponent) -> f64 {
    let abs: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
    let cell = f.grid().cell_volume();
    match p {
        Exponent::Infinity => lq_sum(&abs, p),
        Exponent::Finite(pv) => lq_sum(&abs, p) * cell.powf(1.0 / pv),
    }
}

fn weighted_block(f: &Spectrum, j: usize, s: f64) -> Field {
    let profile = BumpProfile::STANDARD;
    inverse(&f.multiply(|xi| {
        let r = l1_norm(xi);
        let w = profile.block_weight(j, r);
        if w == 0.0 {
            0.0
        } else {
            w * (s * r).exp2()
        }
    }))
}

fn block_range(f: &Spectrum) -> std::ops::RangeInclusive<usize> {
    0..=lp::max_block(f.grid(), &BumpProfile::STANDARD)
}

/// `‖F‖_{B^{σ,s}_{p,q}}` restricted to the blocks in `set`.
pub fn besov_norm(f: &Spectrum, spec: &NormSpec, set: IndexSet) -> f64 {
    let terms: Vec<f64> = block_range(f)
        .filter(|&j| set.contains(j))
        .map(|j| 2f64.powf(spec.sigma * j as f64) * lp_norm(&weighted_block(f, j, spec.s), spec.p))
        .collect();
    lq_sum(&terms, spec.q)
}

/// `‖F‖_{F^{σ,s}_{p,q}}`: pointwise `ℓ^q` over blocks, then `L^p`.
pub fn triebel_norm(f: &Spectrum, spec: &NormSpec) -> f64 {
    let len = f.grid().len();
    let mut peak = vec![0.0f64; len];
    let mut blocks = Vec::new();
    for j in block_range(f) {
        let w = 2f64.powf(spec.sigma * j as f64);
        let b: Vec<f64> = weighted_block(f, j, spec.s).values().iter().map(|z| w * z.norm()).collect();
        for (m, v) in peak.iter_mut().zip(&b) {
            *m = m.max(*v);
        }
        blocks.push(b);
    }
    let pointwise: Vec<f64> = (0..len)
        .map(|x| match spec.q {
            Exponent::Infinity => peak[x],
            Exponent::Finite(q) => {
                let m = peak[x];
                if m == 0.0 {
                    0.0
                } else {
                    m * blocks.iter().map(|b| (b[x] / m).powf(q)).sum::<f64>().powf(1.0 / q)
                }
            }
        })
        .collect();
    let cell = f.grid().cell_volume();
    match spec.p {
        Exponent::Infinity => lq_sum(&pointwise, spec.p),
        Exponent::Finite(p) => lq_sum(&pointwise, spec.p) * cell.powf(1.0 / p),
    }
}

/// `‖⟨∇⟩^σ 2^{s|∇|} f‖_{L^p}`.
pub fn bessel_norm(f: &Spectrum, sigma: f64, s: f64, p: Exponent) -> f64 {
    let g = f.multiply(|xi| bracket(xi).powf(sigma) * (s * l1_norm(xi)).exp2());
    lp_norm(&inverse(&g), p)
}

/// `‖F‖_{E^{σ,s}} = ‖⟨ξ⟩^σ 2^{s|ξ|} F‖_{L^2}`, computed on coefficients.
pub fn e_norm(f: &Spectrum, sigma: f64, s: f64) -> f64 {
    let mut acc = Vec::with_capacity(f.grid().len());
    f.grid().for_each_frequency(|i, xi| {
        let w = bracket(xi).powf(sigma) * (s * l1_norm(xi)).exp2();
        acc.push(w * f.values()[i].norm());
    });
    lq_sum(&acc, Exponent::Finite(2.0)) * f.grid().cell_volume().sqrt()
}

/// Sobolev `H^κ` norm evaluated in physical space.
pub fn sobolev_norm(f: &Spectrum, kappa: f64) -> f64 {
    lp_norm(&inverse(&lp::bracket_op(f, kappa)), Exponent::Finite(2.0))
}

/// One of the norms above, for the probes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Norm {
    Besov(NormSpec, IndexSet),
    Triebel(NormSpec),
    Bessel { sigma: f64, s: f64, p: Exponent },
    E { sigma: f64, s: f64 },
}

impl Norm {
    pub fn eval(&self, f: &Spectrum) -> f64 {
        match self {
            Norm::Besov(spec, set) => besov_norm(f, spec, *set),
            Norm::Triebel(spec) => triebel_norm(f, spec),
            Norm::Bessel { sigma, s, p } => bessel_norm(f, *sigma, *s, *p),
            Norm::E { sigma, s } => e_norm(f, *sigma, *s),
        }
    }

    pub fn s(&self) -> f64 {
        match self {
            Norm::Besov(spec, _) | Norm::Triebel(spec) => spec.s,
            Norm::Bessel { s, .. } | Norm::E { s, .. } => *s,
        }
    }

    pub fn with_s(&self, s: f64) -> Norm {
        match *self {
            Norm::Besov(spec, set) => Norm::Besov(spec.with_s(s), set),
            Norm::Triebel(spec) => Norm::Triebel(spec.with_s(s)),
            Norm::Bessel { sigma, p, .. } => Norm::Bessel { sigma, s, p },
            Norm::E { sigma, .. } => Norm::E { sigma, s },
        }
    }
}

/// Time quadrature and index data for `L^γ(0,T; B^{σ,s}_{p,q})`-type norms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeNormSpec {
    pub gamma: Exponent,
    pub space: NormSpec,
    pub set: IndexSet,
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeNormSpec {
    pub fn new(
        gamma: Exponent,
        space: NormSpec,
        set: IndexSet,
        times: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if times.len() != weights.len() || times.is_empty() {
            return Err(Error::InvalidParameter("times and weights must match and be nonempty".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        Ok(Self {
            gamma,
            space,
            set,
            times,
            weights,
        })
    }

    /// Composite trapezoid weights on the given nodes.
    pub fn trapezoid(gamma: Exponent, space: NormSpec, set: IndexSet, times: Vec<f64>) -> Result<Self> {
        let weights = trapezoid_weights(&times);
        Self::new(gamma, space, set, times, weights)
    }
}

pub fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for i in 1..n {
        let h = times[i] - times[i - 1];
        w[i - 1] += h / 2.0;
        w[i] += h / 2.0;
    }
    if n == 1 {
        w[0] = 1.0;
    }
    w
}

/// Chemin–Lerner norm: `ℓ^q_j` of `2^{σj} ‖ ‖2^{s|∇|}Δ_j u‖_{L^p_x} ‖_{L^γ_t}`.
pub fn chemin_lerner_norm(u: &TimeSeriesField, spec: &TimeNormSpec) -> Result<f64> {
    if u.times() != spec.times.as_slice() {
        return Err(Error::InvalidParameter("series times differ from the norm's time grid".into()));
    }
    let sp = &spec.space;
    let range = lp::max_block(u.grid(), &BumpProfile::STANDARD);
    let terms: Vec<f64> = (0..=range)
        .filter(|&j| spec.set.contains(j))
        .map(|j| {
            let in_time: Vec<f64> = u
                .snapshots()
                .iter()
                .map(|f| lp_norm(&weighted_block(f, j, sp.s), sp.p))
                .collect();
            2f64.powf(sp.sigma * j as f64) * weighted_lq(&in_time, &spec.weights, spec.gamma)
        })
        .collect();
    Ok(lq_sum(&terms, sp.q))
}
