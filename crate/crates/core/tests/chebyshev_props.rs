mod common;

use common::general;
use iptlab::chebyshev::{chebyshev_radius, diameter, radius_bound_selfadjoint, SolverOptions};
use iptlab::generators::{GenKind, GenSpec, Sampler};
use iptlab::OperatorField;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich_and_attained_radius(seed: u64, d in 1usize..=4, n in 1usize..=6) {
        let f = general(&mut Sampler::new(seed), d, n);
        let opts = SolverOptions::default();
        let r = chebyshev_radius(&f, &opts).unwrap();
        let diam = diameter(&f);
        prop_assert!(diam / 2.0 - opts.tol <= r.radius && r.radius <= diam + opts.tol);
        let attained = f.ops().map(|a| a.distance(&r.center)).fold(0.0, f64::max);
        prop_assert!((attained - r.radius).abs() <= 1e-12 * r.radius.max(1.0));
        prop_assert!(r.certified_lower <= r.radius + 1e-12);
    }

    #[test]
    fn bounded_fields_respect_the_interval_bound(seed: u64, d in 1usize..=4, n in 1usize..=6) {
        let mut rng = Sampler::new(seed);
        let c = rng.hermitian(d, 1.0);
        let g = rng.ginibre(d, 1.0);
        let upper = (&c + &(&g * &g.adjoint())).hermitian_part();
        let f = rng.field(&GenSpec::new(0, d, n, GenKind::SelfadjointBounded { c: c.clone(), d: upper.clone() })).unwrap();
        let r = chebyshev_radius(&f, &SolverOptions::default()).unwrap();
        prop_assert!(r.radius <= radius_bound_selfadjoint(&c, &upper).unwrap() + 1e-6);
    }

    #[test]
    fn translation_equivariance(seed: u64, d in 1usize..=3, n in 2usize..=5) {
        let mut rng = Sampler::new(seed);
        let f = general(&mut rng, d, n);
        let t = rng.ginibre(d, 2.0);
        let shifted = OperatorField::probability(&f.weights(), f.ops().map(|a| a + &t).collect()).unwrap();
        let opts = SolverOptions { tol: 1e-9, ..SolverOptions::default() };
        let (r, s) = (chebyshev_radius(&f, &opts).unwrap(), chebyshev_radius(&shifted, &opts).unwrap());
        prop_assert!((r.radius - s.radius).abs() <= 1e-8 * r.radius.max(1.0), "{} {}", r.radius, s.radius);
        if r.gap() <= 1e-9 && d == 1 {
            prop_assert!(s.center.distance(&(&r.center + &t)) <= 1e-4);
        }
    }
}
