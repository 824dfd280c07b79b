use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use okg_core::lattice::{project, support_mass_outside, GridSpec, Spectrum, SupportRegion};
use okg_core::littlewood_paley::smooth;
use okg_core::propagator::{linear_solve, uniform_times, PropagatorSpec};
use okg_core::solver::{band_limit, dealiased_product, scale_data, Direction};
use okg_core::spaces::e_norm;

fn spectrum(grid: GridSpec, seed: &[f64]) -> Spectrum {
    let vals = (0..grid.len())
        .map(|i| Complex64::new(seed[(2 * i) % seed.len()], seed[(2 * i + 1) % seed.len()]))
        .collect();
    Spectrum::new(grid, vals).unwrap()
}

fn rel(a: &Spectrum, b: &Spectrum) -> f64 {
    a.sub(b).unwrap().max_abs() / a.max_abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn smoothing_is_multiplicative_on_octant_products(
        d in 1usize..=2,
        alpha in 1u32..=3,
        s in -1.0f64..1.0,
        seed in prop::collection::vec(-1.0f64..1.0, 37..101),
    ) {
        let n = if d == 1 { 64 } else { 16 };
        let g = GridSpec::new(d, n, 2.0 * PI).unwrap();
        let band = band_limit(n, alpha);
        let factors: Vec<Spectrum> = (0..=alpha as usize)
            .map(|k| project(&spectrum(g, &seed[k..]), SupportRegion::OctantBox(band)))
            .collect();
        let prod = dealiased_product(&factors, band).unwrap();
        prop_assert!(support_mass_outside(&prod, SupportRegion::Octant) < 1e-14);
        let smoothed: Vec<Spectrum> = factors.iter().map(|f| smooth(f, s).unwrap()).collect();
        let lhs = smooth(&prod, s).unwrap();
        let rhs = dealiased_product(&smoothed, band).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-10, "{}", rel(&lhs, &rhs));
    }

    #[test]
    fn smoothing_commutes_with_free_evolution(
        s in -1.0f64..1.0,
        lambda in 1.0f64..8.0,
        seed in prop::collection::vec(-1.0f64..1.0, 16..64),
    ) {
        let g = GridSpec::new(1, 64, 4.0 * PI).unwrap();
        let u0 = project(&spectrum(g, &seed), SupportRegion::Octant);
        let u1 = project(&spectrum(g, &seed[3..]), SupportRegion::Octant);
        let spec = PropagatorSpec::new(lambda).unwrap();
        let times = uniform_times(1.5, 6).unwrap();
        let a = linear_solve(&u0, &u1, None, &spec, &times).unwrap();
        let b = linear_solve(&smooth(&u0, s).unwrap(), &smooth(&u1, s).unwrap(), None, &spec, &times).unwrap();
        for (x, y) in a.snapshots().iter().zip(b.snapshots()) {
            let x = smooth(x, s).unwrap();
            prop_assert!(rel(&x, y) < 1e-12);
        }
    }

    #[test]
    fn data_scaling_round_trips(
        k in 0i32..4,
        alpha in prop::option::of(1u32..=4),
        seed in prop::collection::vec(-1.0f64..1.0, 16..64),
    ) {
        let g = GridSpec::new(2, 16, 2.0 * PI).unwrap();
        let (u0, u1) = (spectrum(g, &seed), spectrum(g, &seed[5..]));
        let lambda = 2f64.powi(k);
        let (a, b) = scale_data(&u0, &u1, lambda, alpha, Direction::Forward).unwrap();
        prop_assert_eq!(a.grid().length(), g.length() / lambda);
        let (x, y) = scale_data(&a, &b, lambda, alpha, Direction::Back).unwrap();
        prop_assert!(rel(&u0, &x) < 1e-14 && rel(&u1, &y) < 1e-14);
        // The amplitude factor λ^{2/α} on u0 shows up in every norm on the
        // unit-frequency lattice, where the E^{0,0} norm carries L^{d/2}.
        let expect = lambda.powf(alpha.map_or(0.0, |al| 2.0 / al as f64)) / lambda;
        let ratio = e_norm(&a, 0.0, 0.0) / e_norm(&u0, 0.0, 0.0);
        prop_assert!((ratio / expect - 1.0).abs() < 1e-12, "{} {}", ratio, expect);
    }
}
