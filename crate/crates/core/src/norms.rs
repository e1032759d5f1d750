//! Symmetric gauge functions and the unitarily invariant norms they induce.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, Operator, SingularSpectrum};

/// Which symmetric gauge function is applied to the singular values.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeKind {
    /// `ℓ_p` of the singular values, `p ∈ [1, ∞]`.
    Schatten { p: f64 },
    /// Sum of the `k` largest singular values.
    KyFan { k: usize },
    /// `Σ c_n s_n` with `c` nonincreasing, nonnegative, `c_1 > 0`.
    WeightedKyFan { c: Vec<f64> },
}

/// A symmetric gauge function, optionally `p`-reconvexized:
/// `‖A‖_{Φ^(p)} = ‖ |A|^p ‖_Φ^{1/p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeSpec {
    kind: GaugeKind,
    reconvex_p: f64,
}

impl GaugeSpec {
    pub fn new(kind: GaugeKind, reconvex_p: f64) -> Result<Self> {
        match &kind {
            GaugeKind::Schatten { p } => {
                if p.is_nan() || *p < 1.0 {
                    return Err(Error::InvalidGauge(format!("schatten p must be >= 1 or inf, got {p}")));
                }
            }
            GaugeKind::KyFan { k } => {
                if *k < 1 {
                    return Err(Error::InvalidGauge("ky_fan k must be >= 1".into()));
                }
            }
            GaugeKind::WeightedKyFan { c } => {
                if c.is_empty() || c[0].partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return Err(Error::InvalidGauge("weighted_ky_fan needs c_1 > 0".into()));
                }
                if c.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::InvalidGauge("weighted_ky_fan weights must be finite and nonnegative".into()));
                }
                if c.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidGauge("weighted_ky_fan weights must be nonincreasing".into()));
                }
            }
        }
        if !reconvex_p.is_finite() || reconvex_p < 1.0 {
            return Err(Error::InvalidGauge(format!("reconvex_p must be a finite real >= 1, got {reconvex_p}")));
        }
        Ok(GaugeSpec { kind, reconvex_p })
    }

    pub fn schatten(p: f64) -> Result<Self> {
        Self::new(GaugeKind::Schatten { p }, 1.0)
    }

    pub fn ky_fan(k: usize) -> Result<Self> {
        Self::new(GaugeKind::KyFan { k }, 1.0)
    }

    pub fn weighted_ky_fan(c: Vec<f64>) -> Result<Self> {
        Self::new(GaugeKind::WeightedKyFan { c }, 1.0)
    }

    /// `‖·‖_∞`, the operator norm.
    pub fn operator_norm() -> Self {
        GaugeSpec { kind: GaugeKind::Schatten { p: f64::INFINITY }, reconvex_p: 1.0 }
    }

    /// `‖·‖_1`, the trace norm.
    pub fn trace_norm() -> Self {
        GaugeSpec { kind: GaugeKind::Schatten { p: 1.0 }, reconvex_p: 1.0 }
    }

    pub fn reconvexized(&self, p: f64) -> Result<Self> {
        Self::new(self.kind.clone(), p)
    }

    pub fn kind(&self) -> &GaugeKind {
        &self.kind
    }

    pub fn reconvex_p(&self) -> f64 {
        self.reconvex_p
    }

    /// Applies the (reconvexized) gauge to a spectrum.
    pub fn evaluate(&self, spectrum: &SingularSpectrum) -> f64 {
        let s = spectrum.values();
        if self.reconvex_p == 1.0 {
            return base_gauge(&self.kind, s);
        }
        let p = self.reconvex_p;
        // Factor out s_1 so the p-th powers stay in range; Φ is homogeneous.
        let top = spectrum.largest();
        if top == 0.0 {
            return 0.0;
        }
        let powered: Vec<f64> = s.iter().map(|&x| (x / top).powf(p)).collect();
        top * base_gauge(&self.kind, &powered).powf(1.0 / p)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

fn base_gauge(kind: &GaugeKind, s: &[f64]) -> f64 {
    match kind {
        GaugeKind::Schatten { p } => schatten_sum(s, *p),
        GaugeKind::KyFan { k } => s.iter().take(*k).sum(),
        GaugeKind::WeightedKyFan { c } => s.iter().zip(c).map(|(x, w)| x * w).sum(),
    }
}

fn schatten_sum(s: &[f64], p: f64) -> f64 {
    let top = s.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() {
        return top;
    }
    if p == 1.0 {
        return s.iter().sum();
    }
    if top == 0.0 {
        return 0.0;
    }
    top * s.iter().map(|&x| (x / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

impl fmt::Display for GaugeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GaugeKind::Schatten { p } if p.is_infinite() => write!(f, "schatten:inf")?,
            GaugeKind::Schatten { p } => write!(f, "schatten:{p}")?,
            GaugeKind::KyFan { k } => write!(f, "ky_fan:{k}")?,
            GaugeKind::WeightedKyFan { c } => {
                let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "weighted_ky_fan:[{}]", c.join(","))?
            }
        }
        if self.reconvex_p != 1.0 {
            write!(f, "^({})", self.reconvex_p)?;
        }
        Ok(())
    }
}

/// Parses the labels written by `Display`, e.g. `schatten:inf`, `ky_fan:2`,
/// `weighted_ky_fan:[1,0.5]` or `schatten:2^(3)`.
impl std::str::FromStr for GaugeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGauge(format!("cannot parse gauge {s:?}"));
        let s = s.trim();
        let (body, reconvex) = match s.split_once("^(") {
            Some((b, r)) => (b, r.strip_suffix(')').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?),
            None => (s, 1.0),
        };
        let (name, arg) = body.split_once(':').ok_or_else(bad)?;
        let kind = match name {
            "schatten" => GaugeKind::Schatten { p: parse_p(arg).ok_or_else(bad)? },
            "ky_fan" => GaugeKind::KyFan { k: arg.parse().map_err(|_| bad())? },
            "weighted_ky_fan" => {
                let inner = arg.strip_prefix('[').and_then(|a| a.strip_suffix(']')).ok_or_else(bad)?;
                let c = inner.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>();
                GaugeKind::WeightedKyFan { c: c.map_err(|_| bad())? }
            }
            _ => return Err(bad()),
        };
        GaugeSpec::new(kind, reconvex)
    }
}

fn parse_p(arg: &str) -> Option<f64> {
    match arg {
        "inf" | "infinity" => Some(f64::INFINITY),
        _ => arg.parse().ok(),
    }
}

/// `p` is written as a JSON number, or the string `"inf"` for the operator norm.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PValue {
    Number(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GaugeRepr {
    Schatten {
        p: PValue,
        #[serde(default = "one")]
        reconvex_p: f64,
    },
    KyFan {
        k: usize,
        #[serde(default = "one")]
        reconvex_p: f64,
    },
    WeightedKyFan {
        c: Vec<f64>,
        #[serde(default = "one")]
        reconvex_p: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Serialize for GaugeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let reconvex_p = self.reconvex_p;
        let repr = match &self.kind {
            GaugeKind::Schatten { p } => GaugeRepr::Schatten {
                p: if p.is_infinite() { PValue::Text("inf".into()) } else { PValue::Number(*p) },
                reconvex_p,
            },
            GaugeKind::KyFan { k } => GaugeRepr::KyFan { k: *k, reconvex_p },
            GaugeKind::WeightedKyFan { c } => GaugeRepr::WeightedKyFan { c: c.clone(), reconvex_p },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaugeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (kind, reconvex_p) = match GaugeRepr::deserialize(d)? {
            GaugeRepr::Schatten { p, reconvex_p } => {
                let p = match p {
                    PValue::Number(x) => x,
                    PValue::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
                    PValue::Text(t) => t.parse::<f64>().map_err(serde::de::Error::custom)?,
                };
                (GaugeKind::Schatten { p }, reconvex_p)
            }
            GaugeRepr::KyFan { k, reconvex_p } => (GaugeKind::KyFan { k }, reconvex_p),
            GaugeRepr::WeightedKyFan { c, reconvex_p } => (GaugeKind::WeightedKyFan { c }, reconvex_p),
        };
        GaugeSpec::new(kind, reconvex_p).map_err(serde::de::Error::custom)
    }
}

/// `|||X|||_g`.
pub fn ui_norm(x: &Operator, g: &GaugeSpec) -> Result<f64> {
    Ok(g.evaluate(&singular_values(x)?))
}

/// Ky Fan dominance of spectra: every partial sum of `x` is at most that of `y` plus `tol`.
pub fn fan_dominates(x: &SingularSpectrum, y: &SingularSpectrum, tol: f64) -> bool {
    x.partial_sums()
        .iter()
        .zip(y.partial_sums().iter())
        .all(|(a, b)| *a <= *b + tol)
}

/// True iff `X` is Ky Fan dominated by `Y`, which implies `|||X||| ≤ |||Y|||` for
/// every unitarily invariant norm.
pub fn fan_dominance_check(x: &Operator, y: &Operator, tol: f64) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(fan_dominates(&singular_values(x)?, &singular_values(y)?, tol))
}

/// The versioned family of gauges used wherever a statement quantifies over
/// all unitarily invariant norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub version: u32,
    pub schatten: Vec<PValueSpec>,
    /// Ky Fan selectors: `"1"`, `"half"` (⌈d/2⌉), `"full"` (d), or an integer string.
    pub ky_fan: Vec<String>,
}

/// A Schatten exponent as written in configuration files.
#[derive(Clone, Debug, PartialEq)]
pub struct PValueSpec(pub f64);

impl Serialize for PValueSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            PValue::Text("inf".into()).serialize(s)
        } else {
            PValue::Number(self.0).serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for PValueSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PValue::deserialize(d)? {
            PValue::Number(x) => Ok(PValueSpec(x)),
            PValue::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(PValueSpec(f64::INFINITY)),
            PValue::Text(t) => t.parse().map(PValueSpec).map_err(serde::de::Error::custom),
        }
    }
}

pub const PROBE_SET_VERSION: u32 = 1;

impl Default for ProbeSet {
    fn default() -> Self {
        ProbeSet {
            version: PROBE_SET_VERSION,
            schatten: [1.0, 1.5, 2.0, 3.0, f64::INFINITY].into_iter().map(PValueSpec).collect(),
            ky_fan: vec!["1".into(), "half".into(), "full".into()],
        }
    }
}

/// Resolves a Ky Fan selector against the dimension.
pub fn resolve_ky_fan(selector: &str, dim: usize) -> Result<usize> {
    let k = match selector {
        "half" => dim.div_ceil(2),
        "full" => dim,
        other => other
            .parse::<usize>()
            .map_err(|_| Error::InvalidGauge(format!("unknown ky_fan selector {other:?}")))?,
    };
    if k == 0 {
        return Err(Error::InvalidGauge("ky_fan k must be >= 1".into()));
    }
    Ok(k.min(dim.max(1)))
}

impl ProbeSet {
    /// The concrete gauges for dimension `dim`, Ky Fan duplicates removed.
    pub fn gauges(&self, dim: usize) -> Result<Vec<GaugeSpec>> {
        let mut out = Vec::new();
        for p in &self.schatten {
            out.push(GaugeSpec::schatten(p.0)?);
        }
        let mut ks = Vec::new();
        for sel in &self.ky_fan {
            let k = resolve_ky_fan(sel, dim)?;
            if !ks.contains(&k) {
                ks.push(k);
                out.push(GaugeSpec::ky_fan(k)?);
            }
        }
        Ok(out)
    }
}

/// `‖X‖_∞ ≤ |||X||| ≤ ‖X‖_1` over the default probe set.
pub fn norm_bracket_check(x: &Operator) -> Result<bool> {
    let s = singular_values(x)?;
    let lo = s.largest();
    let hi: f64 = s.values().iter().sum();
    let tol = 1e-10 * (1.0 + hi);
    let gauges = ProbeSet::default().gauges(x.dim())?;
    Ok(gauges.iter().all(|g| {
        let v = g.evaluate(&s);
        lo <= v + tol && v <= hi + tol
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag34() -> Operator {
        Operator::from_real_diagonal(&[3.0, 4.0])
    }

    #[test]
    fn labels_parse_back() {
        for g in [
            GaugeSpec::operator_norm(),
            GaugeSpec::schatten(1.5).unwrap(),
            GaugeSpec::ky_fan(3).unwrap(),
            GaugeSpec::weighted_ky_fan(vec![1.0, 0.5]).unwrap(),
            GaugeSpec::schatten(2.0).unwrap().reconvexized(3.0).unwrap(),
        ] {
            assert_eq!(g.label().parse::<GaugeSpec>().unwrap(), g);
        }
        assert!("schatten:0.5".parse::<GaugeSpec>().is_err());
        assert!("frobenius".parse::<GaugeSpec>().is_err());
    }

    #[test]
    fn ui_norm_examples() {
        let x = diag34();
        assert!((ui_norm(&x, &GaugeSpec::schatten(2.0).unwrap()).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(ui_norm(&x, &GaugeSpec::ky_fan(1).unwrap()).unwrap(), 4.0);
        assert_eq!(ui_norm(&x, &GaugeSpec::ky_fan(2).unwrap()).unwrap(), 7.0);
        // ‖diag(9,16)‖_2^{1/2} = 337^{1/4}
        let g = GaugeSpec::schatten(2.0).unwrap().reconvexized(2.0).unwrap();
        let expected = 337f64.powf(0.25);
        assert!((expected - 4.284_572_3).abs() < 1e-6);
        assert!((ui_norm(&x, &g).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn ky_fan_beyond_dimension_saturates() {
        let x = diag34();
        assert_eq!(ui_norm(&x, &GaugeSpec::ky_fan(10).unwrap()).unwrap(), 7.0);
        let w = GaugeSpec::weighted_ky_fan(vec![1.0, 0.5, 0.25]).unwrap();
        assert_eq!(ui_norm(&x, &w).unwrap(), 4.0 + 1.5);
    }

    #[test]
    fn gauge_validation() {
        assert!(GaugeSpec::schatten(0.5).is_err());
        assert!(GaugeSpec::schatten(f64::NAN).is_err());
        assert!(GaugeSpec::ky_fan(0).is_err());
        assert!(GaugeSpec::weighted_ky_fan(vec![0.0, 0.0]).is_err());
        assert!(GaugeSpec::weighted_ky_fan(vec![1.0, 2.0]).is_err());
        assert!(GaugeSpec::weighted_ky_fan(vec![1.0, -1.0]).is_err());
        assert!(GaugeSpec::schatten(2.0).unwrap().reconvexized(0.5).is_err());
    }

    #[test]
    fn operator_and_trace_norm_agree_with_ky_fan() {
        let x = Operator::from_real_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, -1.0, 3.0], vec![1.0, 0.0, 1.0]]).unwrap();
        let s = singular_values(&x).unwrap();
        assert_eq!(GaugeSpec::operator_norm().evaluate(&s), GaugeSpec::ky_fan(1).unwrap().evaluate(&s));
        let t1 = GaugeSpec::trace_norm().evaluate(&s);
        let kf = GaugeSpec::ky_fan(3).unwrap().evaluate(&s);
        assert!((t1 - kf).abs() <= 1e-12 * t1);
    }

    #[test]
    fn dominance_examples() {
        let y = Operator::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(fan_dominance_check(&Operator::zeros(2), &y, 0.0).unwrap());
        assert!(fan_dominance_check(&y, &y, 0.0).unwrap());
        assert!(!fan_dominance_check(
            &Operator::from_real_diagonal(&[2.0, 0.0]),
            &Operator::identity(2),
            1e-12
        )
        .unwrap());
    }

    #[test]
    fn bracket_examples() {
        assert!(norm_bracket_check(&Operator::identity(2)).unwrap());
        assert!(norm_bracket_check(&Operator::zeros(3)).unwrap());
        let s = singular_values(&Operator::identity(2)).unwrap();
        assert_eq!(GaugeSpec::operator_norm().evaluate(&s), 1.0);
        assert!((GaugeSpec::schatten(2.0).unwrap().evaluate(&s) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(GaugeSpec::trace_norm().evaluate(&s), 2.0);
    }

    #[test]
    fn probe_set_resolution() {
        let g = ProbeSet::default().gauges(5).unwrap();
        let labels: Vec<String> = g.iter().map(|g| g.label()).collect();
        assert_eq!(
            labels,
            ["schatten:1", "schatten:1.5", "schatten:2", "schatten:3", "schatten:inf", "ky_fan:1", "ky_fan:3", "ky_fan:5"]
        );
        // d = 1 collapses the three Ky Fan selectors to one gauge.
        assert_eq!(ProbeSet::default().gauges(1).unwrap().len(), 6);
    }

    #[test]
    fn gauge_json_encoding() {
        let g: GaugeSpec = serde_json::from_str(r#"{"kind":"schatten","p":2.0,"reconvex_p":1.0}"#).unwrap();
        assert_eq!(g, GaugeSpec::schatten(2.0).unwrap());
        let g: GaugeSpec = serde_json::from_str(r#"{"kind":"ky_fan","k":3}"#).unwrap();
        assert_eq!(g, GaugeSpec::ky_fan(3).unwrap());
        let g: GaugeSpec = serde_json::from_str(r#"{"kind":"schatten","p":"inf"}"#).unwrap();
        assert_eq!(g, GaugeSpec::operator_norm());
        let g: GaugeSpec =
            serde_json::from_str(r#"{"kind":"weighted_ky_fan","c":[2.0,1.0],"reconvex_p":3.0}"#).unwrap();
        assert_eq!(g.reconvex_p(), 3.0);
        assert_eq!(
            serde_json::to_string(&GaugeSpec::operator_norm()).unwrap(),
            r#"{"kind":"schatten","p":"inf","reconvex_p":1.0}"#
        );
        assert!(serde_json::from_str::<GaugeSpec>(r#"{"kind":"ky_fan","k":0}"#).is_err());
        assert!(serde_json::from_str::<GaugeSpec>(r#"{"kind":"nuclear"}"#).is_err());
    }
}
