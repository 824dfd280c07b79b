use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::Exponent;

/// Strichartz exponents for `(d, p, θ)`:
/// `δ = 1/2 - 1/p`, `2/γ = (d-1+θ)δ`, `2σ = (d+1+θ)δ`.
/// `gamma1`/`sigma1` are the `θ = 0` values, `gamma0`/`sigma0` the `θ = 1` values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentTable {
    pub d: usize,
    pub p: Exponent,
    pub theta: f64,
    pub delta: f64,
    pub two_over_gamma: f64,
    pub gamma: Exponent,
    pub sigma: f64,
    pub gamma1: Exponent,
    pub sigma1: f64,
    pub gamma0: Exponent,
    pub sigma0: f64,
    pub admissible: bool,
}

fn gamma_from(two_over_gamma: f64) -> Exponent {
    if two_over_gamma == 0.0 {
        Exponent::Infinity
    } else {
        Exponent::Finite(2.0 / two_over_gamma)
    }
}

pub fn strichartz_exponents(d: usize, p: Exponent, theta: f64) -> Result<ExponentTable> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("θ = {theta} not in [0, 1]")));
    }
    if p.value() < 2.0 {
        return Err(Error::Inadmissible(format!("p = {p} < 2")));
    }
    let delta = 0.5 - p.recip();
    let df = d as f64;
    let tog = |th: f64| (df - 1.0 + th) * delta;
    let sig = |th: f64| (df + 1.0 + th) * delta / 2.0;
    let two_over_gamma = tog(theta);
    Ok(ExponentTable {
        d,
        p,
        theta,
        delta,
        two_over_gamma,
        gamma: gamma_from(two_over_gamma),
        sigma: sig(theta),
        gamma1: gamma_from(tog(0.0)),
        sigma1: sig(0.0),
        gamma0: gamma_from(tog(1.0)),
        sigma0: sig(1.0),
        admissible: (0.0..=1.0 + 1e-15).contains(&two_over_gamma),
    })
}

impl ExponentTable {
    /// Largest deviation in the three defining relations.
    pub fn relation_defect(&self) -> f64 {
        let df = self.d as f64;
        let a = (self.delta - (0.5 - self.p.recip())).abs();
        let b = (2.0 * self.gamma.recip() - (df - 1.0 + self.theta) * self.delta).abs();
        let c = (2.0 * self.sigma - (df + 1.0 + self.theta) * self.delta).abs();
        a.max(b).max(c)
    }
}

/// Critical Sobolev index `d/2 - 2/α`.
pub fn critical_index(d: usize, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("α = {alpha} must be positive")));
    }
    Ok(d as f64 / 2.0 - 2.0 / alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TheoremCase {
    /// Power nonlinearity `u^{1+α}`.
    Power { alpha: f64 },
    /// Exponential-type nonlinearities (sinh, sin, `e^{u²}u`).
    Exponential,
}

/// Integrability exponent and `θ` chosen for the global well-posedness
/// argument: `(p, θ)` for power nonlinearities and `(r, θ)` otherwise.
pub fn theorem_exponent(d: usize, case: TheoremCase) -> Result<(f64, f64)> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let df = d as f64;
    match case {
        TheoremCase::Power { alpha } => {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::InvalidParameter(format!("α = {alpha} must be positive")));
            }
            if d >= 2 && alpha >= 4.0 / (df - 1.0) {
                return Ok((2.0 * (df + 1.0) / (df - 1.0), 0.0));
            }
            let theta = 4.0 / alpha - df + 1.0;
            if theta > 1.0 {
                return Err(Error::Inadmissible(format!("α = {alpha} < 4/d")));
            }
            Ok((2.0 * (df + 1.0 + theta) / (df - 1.0 + theta), theta))
        }
        TheoremCase::Exponential => match d {
            1 => Err(Error::Inadmissible("exponential nonlinearities need d >= 2".into())),
            2 => Ok((2.0 + 4.0 / df, 1.0)),
            _ => Ok((2.0 + 4.0 / (df - 1.0), 0.0)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tabulated_cases() {
        let t = strichartz_exponents(2, Exponent::Finite(4.0), 1.0).unwrap();
        assert_eq!(t.delta, 0.25);
        assert_eq!(t.gamma, Exponent::Finite(4.0));
        assert_eq!(t.sigma, 0.5);
        let t = strichartz_exponents(3, Exponent::Finite(4.0), 0.0).unwrap();
        assert_eq!(t.gamma, Exponent::Finite(4.0));
        assert_eq!(t.sigma, 0.5);
        let t = strichartz_exponents(1, Exponent::Infinity, 1.0).unwrap();
        assert_eq!(t.delta, 0.5);
        assert_eq!(t.gamma, Exponent::Finite(4.0));
        assert_eq!(t.sigma, 0.75);
        let t = strichartz_exponents(3, Exponent::Finite(2.0), 0.5).unwrap();
        assert_eq!(t.gamma, Exponent::Infinity);
        assert!(strichartz_exponents(2, Exponent::Finite(1.5), 0.0).is_err());
        assert!(!strichartz_exponents(3, Exponent::Infinity, 1.0).unwrap().admissible);
    }

    #[test]
    fn critical_indices() {
        assert_eq!(critical_index(3, 2.0).unwrap(), 0.5);
        assert_eq!(critical_index(2, 2.0).unwrap(), 0.0);
        assert!(critical_index(2, 0.0).is_err());
    }

    #[test]
    fn theorem_choices() {
        let (p, th) = theorem_exponent(3, TheoremCase::Power { alpha: 2.0 }).unwrap();
        assert_eq!((p, th), (4.0, 0.0));
        let (p, th) = theorem_exponent(3, TheoremCase::Power { alpha: 1.5 }).unwrap();
        let th_expect = 4.0 / 1.5 - 2.0;
        assert!((th - th_expect).abs() < 1e-15);
        assert!((p - 2.0 * (4.0 + th_expect) / (2.0 + th_expect)).abs() < 1e-14);
        assert!(theorem_exponent(3, TheoremCase::Power { alpha: 1.0 }).is_err());
        assert_eq!(theorem_exponent(2, TheoremCase::Exponential).unwrap(), (4.0, 1.0));
        assert_eq!(theorem_exponent(3, TheoremCase::Exponential).unwrap(), (4.0, 0.0));
        assert!(theorem_exponent(1, TheoremCase::Exponential).is_err());
    }

    proptest! {
        #[test]
        fn relations_hold(d in 1usize..=3, p in 2.0f64..50.0, theta in 0.0f64..=1.0) {
            let t = strichartz_exponents(d, Exponent::Finite(p), theta).unwrap();
            prop_assert!(t.relation_defect() < 1e-14);
            prop_assert!((2.0 * t.gamma1.recip() - (d as f64 - 1.0) * t.delta).abs() < 1e-14);
            prop_assert!((2.0 * t.sigma0 - (d as f64 + 2.0) * t.delta).abs() < 1e-14);
        }

        #[test]
        fn theorem_choice_is_admissible(d in 2usize..=3, alpha in 1.34f64..8.0) {
            if let Ok((p, theta)) = theorem_exponent(d, TheoremCase::Power { alpha }) {
                let t = strichartz_exponents(d, Exponent::Finite(p), theta).unwrap();
                prop_assert!(t.admissible);
            }
        }
    }
}
