#![allow(dead_code)]

use iptlab::generators::{GenKind, GenSpec, Sampler};
use iptlab::{GaugeSpec, Operator, OperatorField, ProbeSet};

pub fn general(rng: &mut Sampler, d: usize, n: usize) -> OperatorField {
    rng.field(&GenSpec { random_weights: true, ..GenSpec::new(0, d, n, GenKind::General) }).unwrap()
}

pub fn commuting_normal(rng: &mut Sampler, d: usize, n: usize) -> OperatorField {
    rng.field(&GenSpec { random_weights: true, ..GenSpec::new(0, d, n, GenKind::CommutingNormal) }).unwrap()
}

/// A second field with the weights of `f`.
pub fn same_weights(f: &OperatorField, ops: Vec<Operator>) -> OperatorField {
    OperatorField::probability(&f.weights(), ops).unwrap()
}

/// Probe gauges plus two reconvexized ones.
pub fn gauges(d: usize) -> Vec<GaugeSpec> {
    let mut g = ProbeSet::default().gauges(d).unwrap();
    g.push(GaugeSpec::schatten(1.0).unwrap().reconvexized(2.0).unwrap());
    g.push(GaugeSpec::ky_fan(1.max(d / 2)).unwrap().reconvexized(3.0).unwrap());
    g
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
