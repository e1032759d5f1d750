//! Operator fields over finite discrete measures.
//!
//! A field is a weighted list of atoms `(w_i, A_i)`; every integral against the
//! measure becomes a finite sum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{loewner_leq, BlockColumn, Operator, HERMITIAN_TOL};

/// Total mass of a probability field may differ from 1 by at most this much.
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Default cap on the number of atoms a power field may have.
pub const DEFAULT_ATOM_BUDGET: usize = 4096;
pub const FIELD_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub op: Operator,
}

/// Which modulus is integrated: `Left` is `|A|² = A*A`, `Right` is `|A*|² = AA*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorField {
    atoms: Vec<Atom>,
    is_probability: bool,
    dim: usize,
}

impl OperatorField {
    pub fn new(atoms: Vec<Atom>, is_probability: bool) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|a| a.op.dim())
            .ok_or_else(|| Error::InvalidField("field has no atoms".into()))?;
        for (i, a) in atoms.iter().enumerate() {
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidField(format!("atom {i} has weight {}, weights must be positive", a.weight)));
            }
            if a.op.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: a.op.dim() });
            }
        }
        if is_probability {
            let mass: f64 = atoms.iter().map(|a| a.weight).sum();
            if (mass - 1.0).abs() > PROBABILITY_TOL {
                return Err(Error::InvalidField(format!("probability weights sum to {mass}")));
            }
        }
        Ok(OperatorField { atoms, is_probability, dim })
    }

    /// Skips validation; for fields derived from already valid ones.
    pub(crate) fn derived(atoms: Vec<Atom>, is_probability: bool) -> Self {
        let dim = atoms[0].op.dim();
        OperatorField { atoms, is_probability, dim }
    }

    /// Uniform probability weights `1/n`.
    pub fn uniform(ops: Vec<Operator>) -> Result<Self> {
        let w = 1.0 / ops.len().max(1) as f64;
        Self::new(ops.into_iter().map(|op| Atom { weight: w, op }).collect(), true)
    }

    pub fn probability(weights: &[f64], ops: Vec<Operator>) -> Result<Self> {
        if weights.len() != ops.len() {
            return Err(Error::InvalidField(format!("{} weights for {} operators", weights.len(), ops.len())));
        }
        let atoms = weights.iter().zip(ops).map(|(&weight, op)| Atom { weight, op }).collect();
        Self::new(atoms, true)
    }

    /// Single atom of mass one.
    pub fn constant(op: Operator) -> Self {
        let dim = op.dim();
        OperatorField { atoms: vec![Atom { weight: 1.0, op }], is_probability: true, dim }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_probability(&self) -> bool {
        self.is_probability
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    pub fn ops(&self) -> impl Iterator<Item = &Operator> {
        self.atoms.iter().map(|a| &a.op)
    }

    pub(crate) fn require_probability(&self, what: &str) -> Result<()> {
        if !self.is_probability {
            return Err(Error::InvalidField(format!("{what} needs a probability field")));
        }
        Ok(())
    }

    fn map_ops(&self, f: impl Fn(&Operator) -> Operator) -> OperatorField {
        let atoms = self.atoms.iter().map(|a| Atom { weight: a.weight, op: f(&a.op) }).collect();
        OperatorField::derived(atoms, self.is_probability)
    }

    /// `Σ w_i A_i`.
    pub fn gelfand_mean(&self) -> Operator {
        let mut acc = Operator::zeros(self.dim);
        for a in &self.atoms {
            acc = acc + a.op.scale_real(a.weight);
        }
        acc
    }

    /// `Σ w_i A_i*A_i` (left) or `Σ w_i A_i A_i*` (right).
    pub fn second_moment(&self, side: Side) -> Operator {
        let mut acc = Operator::zeros(self.dim);
        for a in &self.atoms {
            let term = match side {
                Side::Left => &a.op.adjoint() * &a.op,
                Side::Right => &a.op * &a.op.adjoint(),
            };
            acc = acc + term.scale_real(a.weight);
        }
        acc.hermitian_part()
    }

    /// `∫|A_t|² − |∫A_t|²`, evaluated as the second moment of the centred field so
    /// the result is positive semidefinite up to rounding.
    pub fn variance(&self, side: Side) -> Result<Operator> {
        self.require_probability("variance")?;
        Ok(self.centered().second_moment(side))
    }

    /// `variance(side)^α`, through the SVD of the centred embedding.
    pub fn variance_power(&self, side: Side, alpha: f64) -> Result<Operator> {
        self.require_probability("variance")?;
        self.centered().embed_side(side)?.gram_power(alpha)
    }

    /// `t ↦ A_t − B`.
    pub fn center(&self, b: &Operator) -> Result<OperatorField> {
        if b.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: b.dim() });
        }
        Ok(self.map_ops(|a| a - b))
    }

    /// Centred at the Gel'fand mean.
    pub fn centered(&self) -> OperatorField {
        let m = self.gelfand_mean();
        self.map_ops(|a| a - &m)
    }

    /// `t ↦ A_t*`.
    pub fn adjoint_field(&self) -> OperatorField {
        self.map_ops(Operator::adjoint)
    }

    /// `(s, t) ↦ A_s − A_t` with weights `w_s w_t`; atom `(s, t)` sits at index `s·n + t`.
    pub fn korkine_double(&self) -> Result<OperatorField> {
        self.require_probability("korkine_double")?;
        let mut atoms = Vec::with_capacity(self.len() * self.len());
        for s in &self.atoms {
            for t in &self.atoms {
                atoms.push(Atom { weight: s.weight * t.weight, op: &s.op - &t.op });
            }
        }
        Ok(OperatorField::derived(atoms, true))
    }

    /// `(s, t) ↦ A_s C_t` with product weights; atom `(s, t)` sits at index `s·|G| + t`.
    pub fn product_field(&self, other: &OperatorField) -> Result<OperatorField> {
        self.require_probability("product_field")?;
        other.require_probability("product_field")?;
        if other.dim != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for s in &self.atoms {
            for t in &other.atoms {
                atoms.push(Atom { weight: s.weight * t.weight, op: &s.op * &t.op });
            }
        }
        Ok(OperatorField::derived(atoms, true))
    }

    /// `(t_1, …, t_n) ↦ Π_k A_{t_k}^{*_k}` over `Ωⁿ`, using the stars of the
    /// requested half of `pattern`. Products run left to right in index order and
    /// the first coordinate varies slowest.
    pub fn power_field(&self, pattern: &StarPattern, half: Half, budget: usize) -> Result<OperatorField> {
        self.require_probability("power_field")?;
        let n = pattern.n();
        let required = checked_power(self.len(), n).filter(|&r| r <= budget);
        let Some(required) = required else {
            let shown = checked_power(self.len(), n).unwrap_or(usize::MAX);
            return Err(Error::AtomBudget { required: shown, budget });
        };
        let stars = pattern.half(half);
        let factors: Vec<Vec<Operator>> = stars
            .iter()
            .map(|&star| self.ops().map(|a| if star { a.adjoint() } else { a.clone() }).collect())
            .collect();
        let mut atoms = Vec::with_capacity(required);
        let mut index = vec![0usize; n];
        for _ in 0..required {
            let mut weight = 1.0;
            let mut op = Operator::identity(self.dim);
            for (k, &t) in index.iter().enumerate() {
                weight *= self.atoms[t].weight;
                op = &op * &factors[k][t];
            }
            atoms.push(Atom { weight, op });
            for k in (0..n).rev() {
                index[k] += 1;
                if index[k] < self.len() {
                    break;
                }
                index[k] = 0;
            }
        }
        Ok(OperatorField::derived(atoms, true))
    }

    /// The block column `[√w_1 A_1; …; √w_n A_n]`, whose Gram matrix is the left second moment.
    pub fn embed(&self) -> Result<BlockColumn> {
        self.embed_side(Side::Left)
    }

    /// Right side embeds `√w_i A_i*`, so the Gram matrix is `Σ w_i A_i A_i*`.
    pub fn embed_side(&self, side: Side) -> Result<BlockColumn> {
        let blocks: Vec<Operator> = self
            .atoms
            .iter()
            .map(|a| {
                let s = a.weight.sqrt();
                match side {
                    Side::Left => a.op.scale_real(s),
                    Side::Right => a.op.adjoint().scale_real(s),
                }
            })
            .collect();
        BlockColumn::from_blocks(&blocks)
    }

    /// Every atom normal and every pair commuting, each within `tol` relative to the
    /// natural scale of the product.
    pub fn check_commuting_normal(&self, tol: f64) -> bool {
        let norms: Vec<f64> = self.ops().map(Operator::op_norm).collect();
        let small = |m: &Operator, bound: f64| m.frobenius_norm() <= bound || m.op_norm() <= bound;
        for (a, &na) in self.ops().zip(&norms) {
            if !small(&a.commutator(&a.adjoint()), tol * (1.0 + na * na)) {
                return false;
            }
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let bound = tol * (1.0 + norms[i] * norms[j]);
                if !small(&self.atoms[i].op.commutator(&self.atoms[j].op), bound) {
                    return false;
                }
            }
        }
        true
    }

    /// Every atom Hermitian with `C ≤ A_i ≤ D`, all within `tol`.
    pub fn bounds_check(&self, c: &Operator, d: &Operator, tol: f64) -> Result<bool> {
        for bound in [c, d] {
            if bound.dim() != self.dim {
                return Err(Error::DimMismatch { expected: self.dim, found: bound.dim() });
            }
            if !bound.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::NotHermitian { asymmetry: bound.hermitian_defect() });
            }
        }
        let (c, d) = (c.hermitian_part(), d.hermitian_part());
        for a in self.ops() {
            if !a.is_hermitian(tol) {
                return Ok(false);
            }
            let h = a.hermitian_part();
            if !loewner_leq(&c, &h, tol)? || !loewner_leq(&h, &d, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The normalised restriction `μ(· ∩ δ)/μ(δ)` to the atoms listed in `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Result<OperatorField> {
        if indices.is_empty() {
            return Err(Error::InvalidField("restriction to an empty set".into()));
        }
        let mut atoms = Vec::with_capacity(indices.len());
        for &i in indices {
            let a = self
                .atoms
                .get(i)
                .ok_or_else(|| Error::InvalidField(format!("atom index {i} out of range")))?;
            atoms.push(a.clone());
        }
        let mass: f64 = atoms.iter().map(|a| a.weight).sum();
        for a in &mut atoms {
            a.weight /= mass;
        }
        Ok(OperatorField::derived(atoms, true))
    }

    pub fn max_op_norm(&self) -> f64 {
        self.ops().map(Operator::op_norm).fold(0.0, f64::max)
    }
}

fn checked_power(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// Star pattern `(*_1, …, *_{2n})`; `true` means the adjoint is taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarPattern {
    stars: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    First,
    Second,
}

impl StarPattern {
    pub fn new(stars: Vec<bool>) -> Result<Self> {
        if stars.is_empty() || !stars.len().is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("star pattern needs even positive length, got {}", stars.len())));
        }
        Ok(StarPattern { stars })
    }

    /// `n` plain factors on each side.
    pub fn plain(n: usize) -> Result<Self> {
        Self::new(vec![false; 2 * n])
    }

    pub fn n(&self) -> usize {
        self.stars.len() / 2
    }

    pub fn stars(&self) -> &[bool] {
        &self.stars
    }

    pub fn half(&self, half: Half) -> &[bool] {
        let n = self.n();
        match half {
            Half::First => &self.stars[..n],
            Half::Second => &self.stars[n..],
        }
    }

    /// Number of adjoints in the given half.
    pub fn star_count(&self, half: Half) -> usize {
        self.half(half).iter().filter(|&&s| s).count()
    }
}

/// Written as a string over `{*, 1}`, e.g. `"*1*1"`.
impl FromStr for StarPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let stars = s
            .chars()
            .map(|c| match c {
                '*' => Ok(true),
                '1' => Ok(false),
                other => Err(Error::InvalidParams(format!("star pattern symbol {other:?} is not '*' or '1'"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        StarPattern::new(stars)
    }
}

impl fmt::Display for StarPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.stars {
            f.write_str(if s { "*" } else { "1" })?;
        }
        Ok(())
    }
}

impl Serialize for StarPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for StarPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    w: f64,
    op: Operator,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    #[serde(default = "field_version")]
    format_version: u32,
    is_probability: bool,
    atoms: Vec<AtomRepr>,
}

fn field_version() -> u32 {
    FIELD_FORMAT_VERSION
}

impl Serialize for OperatorField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldRepr {
            format_version: FIELD_FORMAT_VERSION,
            is_probability: self.is_probability,
            atoms: self.atoms.iter().map(|a| AtomRepr { w: a.weight, op: a.op.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldRepr::deserialize(d)?;
        if repr.format_version != FIELD_FORMAT_VERSION {
            return Err(serde::de::Error::custom(format!("unsupported field format_version {}", repr.format_version)));
        }
        let atoms = repr.atoms.into_iter().map(|a| Atom { weight: a.w, op: a.op }).collect();
        OperatorField::new(atoms, repr.is_probability).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn scalars(values: &[f64]) -> OperatorField {
        OperatorField::uniform(values.iter().map(|&v| Operator::real_scalar(v)).collect()).unwrap()
    }

    fn half_diag() -> OperatorField {
        OperatorField::uniform(vec![
            Operator::from_real_diagonal(&[1.0, 0.0]),
            Operator::from_real_diagonal(&[0.0, 1.0]),
        ])
        .unwrap()
    }

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    #[test]
    fn validation() {
        assert!(OperatorField::new(vec![], true).is_err());
        let a = Atom { weight: 0.0, op: Operator::real_scalar(1.0) };
        assert!(OperatorField::new(vec![a], false).is_err());
        let a = Atom { weight: 0.6, op: Operator::real_scalar(1.0) };
        assert!(OperatorField::new(vec![a.clone()], true).is_err());
        assert!(OperatorField::new(vec![a.clone()], false).is_ok());
        let b = Atom { weight: 0.4, op: Operator::identity(2) };
        assert!(matches!(OperatorField::new(vec![a, b], false), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn means_and_moments() {
        let f = scalars(&[0.0, 1.0]);
        assert_eq!(f.gelfand_mean().get(0, 0).re, 0.5);
        assert_eq!(f.second_moment(Side::Left).get(0, 0).re, 0.5);
        assert!((f.variance(Side::Left).unwrap().get(0, 0).re - 0.25).abs() < 1e-15);

        let a = Operator::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        let c = OperatorField::constant(a.clone());
        assert_eq!(c.gelfand_mean(), a);
        assert!(c.variance(Side::Left).unwrap().op_norm() < 1e-15);

        let u = Operator::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(close(&OperatorField::constant(u).second_moment(Side::Left), &Operator::identity(2), 1e-15));

        let h = half_diag();
        let half = Operator::identity(2).scale_real(0.5);
        assert!(close(&h.gelfand_mean(), &half, 1e-15));
        assert!(close(&h.second_moment(Side::Left), &half, 1e-15));
        assert!(close(&h.variance(Side::Left).unwrap(), &Operator::identity(2).scale_real(0.25), 1e-15));
    }

    #[test]
    fn centering() {
        let f = scalars(&[0.0, 1.0]);
        let c = f.center(&Operator::real_scalar(0.5)).unwrap();
        let vals: Vec<f64> = c.ops().map(|a| a.get(0, 0).re).collect();
        assert_eq!(vals, vec![-0.5, 0.5]);
        assert_eq!(c.weights(), vec![0.5, 0.5]);
        assert_eq!(f.center(&Operator::real_scalar(0.0)).unwrap(), f);
        assert!(f.centered().gelfand_mean().op_norm() < 1e-15);
    }

    #[test]
    fn korkine_double_roster() {
        let k = scalars(&[0.0, 1.0]).korkine_double().unwrap();
        let vals: Vec<f64> = k.ops().map(|a| a.get(0, 0).re).collect();
        assert_eq!(vals, vec![0.0, -1.0, 1.0, 0.0]);
        assert_eq!(k.weights(), vec![0.25; 4]);

        let c = OperatorField::constant(Operator::identity(3)).korkine_double().unwrap();
        assert!(c.ops().all(|a| a.op_norm() == 0.0));
    }

    #[test]
    fn product_field_means() {
        let f = scalars(&[0.0, 1.0]);
        let g = scalars(&[1.0, 2.0]);
        let p = f.product_field(&g).unwrap();
        assert_eq!(p.len(), 4);
        assert!((p.gelfand_mean().get(0, 0).re - 0.75).abs() < 1e-15);

        let id = OperatorField::constant(Operator::identity(1));
        assert_eq!(id.product_field(&g).unwrap(), g);
    }

    #[test]
    fn power_field_examples() {
        let f = scalars(&[0.0, 1.0]);
        assert_eq!(f.power_field(&StarPattern::plain(1).unwrap(), Half::First, 16).unwrap(), f);

        let a = Operator::from_rows(&[
            vec![C64::new(1.0, 1.0), C64::new(2.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        ])
        .unwrap();
        let c = OperatorField::constant(a.clone());
        let pat: StarPattern = "*11*".parse().unwrap();
        let p = c.power_field(&pat, Half::First, 16).unwrap();
        assert_eq!(p.len(), 1);
        assert!(close(&p.atoms()[0].op, &(&a.adjoint() * &a), 1e-15));

        let z = OperatorField::uniform(vec![Operator::scalar(C64::new(1.0, 0.0)), Operator::scalar(C64::new(0.0, 1.0))])
            .unwrap();
        let mean = z.power_field(&StarPattern::plain(2).unwrap(), Half::First, 16).unwrap().gelfand_mean();
        let expected = C64::new(0.5, 0.5) * C64::new(0.5, 0.5);
        assert!((mean.get(0, 0) - expected).norm() < 1e-15);

        let err = scalars(&[0.0, 1.0, 2.0]).power_field(&StarPattern::plain(3).unwrap(), Half::First, 26);
        assert!(matches!(err, Err(Error::AtomBudget { required: 27, budget: 26 })));
    }

    #[test]
    fn star_pattern_parsing() {
        let p: StarPattern = "*1*1".parse().unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.half(Half::First), &[true, false]);
        assert_eq!(p.star_count(Half::Second), 1);
        assert_eq!(p.to_string(), "*1*1");
        assert!("*1*".parse::<StarPattern>().is_err());
        assert!("".parse::<StarPattern>().is_err());
        assert!("*x".parse::<StarPattern>().is_err());
    }

    #[test]
    fn embedding() {
        let a = Operator::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let e = OperatorField::constant(a.clone()).embed().unwrap();
        assert_eq!(e.block(0), a);

        let e = half_diag().embed().unwrap();
        assert_eq!(e.matrix().shape(), (4, 2));
        assert!((e.op_norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn commuting_normal_examples() {
        let diag = OperatorField::uniform(vec![
            Operator::from_real_diagonal(&[1.0, -2.0]),
            Operator::from_diagonal(&[C64::new(0.0, 1.0), C64::new(3.0, 1.0)]),
        ])
        .unwrap();
        assert!(diag.check_commuting_normal(1e-10));

        let nil = Operator::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let f = OperatorField::uniform(vec![Operator::identity(2), nil]).unwrap();
        assert!(!f.check_commuting_normal(1e-10));

        let s = 0.5f64.sqrt();
        let u = Operator::from_real_rows(&[vec![s, s], vec![-s, s]]).unwrap();
        let conj = OperatorField::uniform(diag.ops().map(|d| &(&u * d) * &u.adjoint()).collect()).unwrap();
        assert!(conj.check_commuting_normal(1e-10));
    }

    #[test]
    fn bounds_examples() {
        let f = scalars(&[0.0, 0.3, 1.0]);
        let (zero, one) = (Operator::real_scalar(0.0), Operator::real_scalar(1.0));
        assert!(f.bounds_check(&zero, &one, 1e-10).unwrap());

        let a = Operator::from_real_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        assert!(OperatorField::constant(a.clone()).bounds_check(&a, &a, 1e-10).unwrap());

        let g = OperatorField::constant(Operator::from_real_diagonal(&[2.0, 0.0]));
        assert!(!g.bounds_check(&Operator::zeros(2), &Operator::identity(2), 1e-10).unwrap());
    }

    #[test]
    fn restriction_renormalises() {
        let f = scalars(&[0.0, 1.0, 1.0, 5.0]);
        let r = f.restrict(&[0, 2]).unwrap();
        assert_eq!(r.weights(), vec![0.5, 0.5]);
        assert!(f.restrict(&[]).is_err());
        assert!(f.restrict(&[9]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = OperatorField::probability(&[0.25, 0.75], vec![Operator::real_scalar(1.0), Operator::scalar(C64::new(0.0, 2.0))])
            .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"format_version":1,"is_probability":true,"atoms":[{"w":0.25,"op":{"dim":1,"entries":[[[1.0,0.0]]]}},{"w":0.75,"op":{"dim":1,"entries":[[[0.0,2.0]]]}}]}"#
        );
        let back: OperatorField = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"is_probability":true,"atoms":[{"w":0.5,"op":{"dim":1,"entries":[[[1.0,0.0]]]}}]}"#;
        assert!(serde_json::from_str::<OperatorField>(bad).is_err());
        let future = s.replace("\"format_version\":1", "\"format_version\":7");
        assert!(serde_json::from_str::<OperatorField>(&future).is_err());
    }
}
