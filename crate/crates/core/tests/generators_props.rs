use iptlab::generators::{gen_commuting_normal, gen_contraction, gen_general, gen_selfadjoint_bounded, stream_seed, GenKind, GenSpec, Sampler};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn identical_specs_give_identical_fields(seed: u64, d in 1usize..=6, n in 1usize..=8) {
        let spec = GenSpec { random_weights: true, ..GenSpec::new(seed, d, n, GenKind::General) };
        prop_assert_eq!(gen_general(&spec).unwrap(), gen_general(&spec).unwrap());
        let spec = GenSpec { kind: GenKind::CommutingNormal, ..spec };
        prop_assert_eq!(gen_commuting_normal(&spec).unwrap(), gen_commuting_normal(&spec).unwrap());
    }

    #[test]
    fn hypotheses_hold_for_every_draw(seed: u64, d in 1usize..=6, n in 1usize..=8) {
        let f = gen_commuting_normal(&GenSpec::new(seed, d, n, GenKind::CommutingNormal)).unwrap();
        prop_assert!(f.check_commuting_normal(1e-10));

        let mut rng = Sampler::new(stream_seed(seed, "bounds", 0));
        let c = rng.hermitian(d, 1.0);
        let g = rng.ginibre(d, 1.0);
        let upper = (&c + &(&g * &g.adjoint())).hermitian_part();
        let spec = GenSpec::new(seed, d, n, GenKind::SelfadjointBounded { c: c.clone(), d: upper.clone() });
        let f = gen_selfadjoint_bounded(&spec).unwrap();
        prop_assert!(f.bounds_check(&c, &upper, 1e-10).unwrap());

        let x = gen_contraction(&GenSpec::new(seed, d, 1, GenKind::Contraction)).unwrap();
        prop_assert!(x.op_norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn stream_seeds_are_stable(seed: u64, trial: u64) {
        prop_assert_eq!(stream_seed(seed, "t", trial), stream_seed(seed, "t", trial));
        prop_assert_ne!(stream_seed(seed, "t", trial), stream_seed(seed, "u", trial));
    }
}
