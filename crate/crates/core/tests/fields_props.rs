mod common;

use common::{gauges, general};
use iptlab::generators::Sampler;
use iptlab::linalg::psd_power;
use iptlab::norms::ui_norm;
use iptlab::{Operator, Side};
use proptest::prelude::*;

fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
    a.distance(b) <= tol * a.op_norm().max(b.op_norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn korkine_and_centred_variances_agree(seed: u64, d in 1usize..=6, n in 1usize..=8) {
        let f = general(&mut Sampler::new(seed), d, n);
        let var = f.variance(Side::Left).unwrap();
        let half = f.korkine_double().unwrap().second_moment(Side::Left).scale_real(0.5);
        let centred = f.center(&f.gelfand_mean()).unwrap().second_moment(Side::Left);
        prop_assert!(close(&half, &var, 1e-11));
        prop_assert!(close(&centred, &var, 1e-11));
    }

    #[test]
    fn moment_about_any_centre(seed: u64, d in 1usize..=6, n in 1usize..=8, hermitian: bool) {
        let mut rng = Sampler::new(seed);
        let f = general(&mut rng, d, n);
        let b = if hermitian { rng.hermitian(d, 1.0) } else { rng.ginibre(d, 1.0) };
        let lhs = f.center(&b).unwrap().second_moment(Side::Left);
        let shift = &f.gelfand_mean() - &b;
        let rhs = f.variance(Side::Left).unwrap() + (&shift.adjoint() * &shift).hermitian_part();
        prop_assert!(close(&lhs, &rhs, 1e-11));
    }

    #[test]
    fn mean_centre_minimises_every_power(seed: u64, d in 1usize..=4, n in 1usize..=6) {
        let mut rng = Sampler::new(seed);
        let f = general(&mut rng, d, n);
        let var = f.variance(Side::Left).unwrap();
        for theta in [0.5, 1.0, 2.0] {
            let floor = psd_power(&var, theta).unwrap();
            for _ in 0..10 {
                let spread = rng.uniform_in(0.01, 2.0);
                let b = &f.gelfand_mean() + &rng.ginibre(d, spread);
                let moved = psd_power(&f.center(&b).unwrap().second_moment(Side::Left), theta).unwrap();
                for g in gauges(d) {
                    prop_assert!(ui_norm(&moved, &g).unwrap() >= ui_norm(&floor, &g).unwrap() - 1e-9);
                }
            }
        }
    }

    #[test]
    fn korkine_double_has_zero_mean(seed: u64, d in 1usize..=6, n in 1usize..=8) {
        let f = general(&mut Sampler::new(seed), d, n);
        let m = f.korkine_double().unwrap().gelfand_mean();
        prop_assert!(m.op_norm() <= 1e-13 * f.max_op_norm().max(1.0));
    }

    #[test]
    fn embedding_gram_is_the_second_moment(seed: u64, d in 1usize..=6, n in 1usize..=8) {
        let f = general(&mut Sampler::new(seed), d, n);
        let gram = f.embed().unwrap().gram();
        prop_assert!(close(&gram, &f.second_moment(Side::Left), 1e-13));
    }

    #[test]
    fn json_roundtrip_is_exact(seed: u64, d in 1usize..=4, n in 1usize..=5) {
        let f = general(&mut Sampler::new(seed), d, n);
        let back: iptlab::OperatorField = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }
}
