mod common;

use common::{gauges, general, same_weights};
use iptlab::generators::Sampler;
use iptlab::transformers::transformer_norm_ratio;
use iptlab::{Operator, OperatorField, TransformerPair, C64};
use proptest::prelude::*;

fn pair(rng: &mut Sampler, d: usize, n: usize) -> TransformerPair {
    let a = general(rng, d, n);
    let b = same_weights(&a, general(rng, d, n).ops().cloned().collect());
    TransformerPair::new(a, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defect_is_linear(seed: u64, d in 1usize..=6, n in 1usize..=8) {
        let mut rng = Sampler::new(seed);
        let p = pair(&mut rng, d, n);
        let (x, y) = (rng.ginibre(d, 1.0), rng.ginibre(d, 1.0));
        let (al, be) = (rng.complex_normal(), rng.complex_normal());
        let lhs = p.defect(&(x.scale(al) + y.scale(be))).unwrap();
        let rhs = p.defect(&x).unwrap().scale(al) + p.defect(&y).unwrap().scale(be);
        prop_assert!(lhs.distance(&rhs) <= 1e-11 * rhs.op_norm().max(1.0) * (n as f64));
    }

    #[test]
    fn korkine_identity(seed: u64, d in 1usize..=6, n in 1usize..=8) {
        let mut rng = Sampler::new(seed);
        let p = pair(&mut rng, d, n);
        let x = rng.ginibre(d, 1.0);
        prop_assert!(p.korkine_residual(&x).unwrap() <= 1e-11 * p.residual_scale(&x));
    }

    #[test]
    fn identity_attains_and_contractions_respect_the_norm(seed: u64, d in 1usize..=5, n in 1usize..=6) {
        let mut rng = Sampler::new(seed);
        let f = general(&mut rng, d, n);
        let x = rng.contraction(d, 1.0);
        for g in gauges(d) {
            prop_assert!((transformer_norm_ratio(&f, &Operator::identity(d), &g).unwrap() - 1.0).abs() <= 1e-12);
            prop_assert!(transformer_norm_ratio(&f, &x, &g).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn elementary_operator_expansion(seed: u64, d in 1usize..=5, n in 1usize..=6) {
        let mut rng = Sampler::new(seed);
        let a_ops: Vec<Operator> = (0..n).map(|_| rng.ginibre(d, 1.0)).collect();
        let b_ops: Vec<Operator> = (0..n).map(|_| rng.ginibre(d, 1.0)).collect();
        let x = rng.ginibre(d, 1.0);
        let p = TransformerPair::new(OperatorField::uniform(a_ops.clone()).unwrap(), OperatorField::uniform(b_ops.clone()).unwrap()).unwrap();
        let inv = 1.0 / n as f64;
        let sum = |ops: &[Operator]| ops.iter().fold(Operator::zeros(d), |acc, o| acc + o.clone());
        let first = a_ops.iter().zip(&b_ops).fold(Operator::zeros(d), |acc, (a, b)| acc + &(a * &x) * b);
        let direct = first.scale_real(inv) - (&(&sum(&a_ops) * &x) * &sum(&b_ops)).scale(C64::new(inv * inv, 0.0));
        let defect = p.defect(&x).unwrap();
        prop_assert!(defect.distance(&direct) <= 1e-12 * direct.op_norm().max(1.0) * (n as f64));
    }
}
