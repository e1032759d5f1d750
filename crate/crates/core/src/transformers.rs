//! Inner product type transformers `X ↦ ∫ A_t X B_t dμ(t)` and the Grüss defect.

use crate::error::{Error, Result};
use crate::fields::{Atom, OperatorField, Side};
use crate::linalg::Operator;
use crate::norms::{ui_norm, GaugeSpec};

/// Weight vectors of the two fields may differ by at most this much per atom.
pub const WEIGHT_MATCH_TOL: f64 = 1e-14;
/// Relative bound on the Korkine residual.
pub const KORKINE_TOL: f64 = 1e-11;

/// Two fields over one measure, paired atom by atom.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformerPair {
    a: OperatorField,
    b: OperatorField,
}

impl TransformerPair {
    pub fn new(a: OperatorField, b: OperatorField) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidField(format!(
                "transformer fields must share one measure: {} atoms vs {}",
                a.len(),
                b.len()
            )));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimMismatch { expected: a.dim(), found: b.dim() });
        }
        if a.is_probability() != b.is_probability() {
            return Err(Error::InvalidField("transformer fields disagree on is_probability".into()));
        }
        for (i, (x, y)) in a.atoms().iter().zip(b.atoms()).enumerate() {
            if (x.weight - y.weight).abs() > WEIGHT_MATCH_TOL {
                return Err(Error::InvalidField(format!(
                    "atom {i} weights differ: {} vs {}",
                    x.weight, y.weight
                )));
            }
        }
        Ok(TransformerPair { a, b })
    }

    /// The pair built from `(w_i, A_i)` and operators `B_i` on the same weights.
    pub fn from_ops(a: OperatorField, b_ops: Vec<Operator>) -> Result<Self> {
        let w = a.weights();
        let b = if a.is_probability() {
            OperatorField::probability(&w, b_ops)?
        } else {
            OperatorField::new(
                w.iter().zip(b_ops).map(|(&weight, op)| Atom { weight, op }).collect(),
                false,
            )?
        };
        Self::new(a, b)
    }

    pub fn a(&self) -> &OperatorField {
        &self.a
    }

    pub fn b(&self) -> &OperatorField {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    fn check_dim(&self, x: &Operator) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(())
    }

    /// `Σ w_i A_i X B_i`.
    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        self.check_dim(x)?;
        let mut acc = Operator::zeros(self.dim());
        for (p, q) in self.a.atoms().iter().zip(self.b.atoms()) {
            acc = acc + (&(&p.op * x) * &q.op).scale_real(p.weight);
        }
        Ok(acc)
    }

    /// `∫ A X B − (∫A) X (∫B)`.
    pub fn defect(&self, x: &Operator) -> Result<Operator> {
        self.a.require_probability("defect")?;
        let full = self.apply(x)?;
        let means = &(&self.a.gelfand_mean() * x) * &self.b.gelfand_mean();
        Ok(full - means)
    }

    /// The doubled pair `((s,t) ↦ A_s − A_t, (s,t) ↦ B_s − B_t)` over `μ×μ`.
    pub fn korkine_pair(&self) -> Result<TransformerPair> {
        Ok(TransformerPair { a: self.a.korkine_double()?, b: self.b.korkine_double()? })
    }

    /// The residual scale `(1+‖X‖)(1+max‖A_i‖)(1+max‖B_i‖)`.
    pub fn residual_scale(&self, x: &Operator) -> f64 {
        (1.0 + x.op_norm()) * (1.0 + self.a.max_op_norm()) * (1.0 + self.b.max_op_norm())
    }

    /// `‖defect − ½ ∬ (A_s − A_t) X (B_s − B_t)‖`.
    pub fn korkine_residual(&self, x: &Operator) -> Result<f64> {
        let doubled = self.korkine_pair()?.apply(x)?.scale_real(0.5);
        Ok((self.defect(x)? - doubled).op_norm())
    }

    /// Swaps the roles so the pair realizes `X ↦ ∫ B_t* X A_t*`.
    pub fn adjoint_pair(&self) -> TransformerPair {
        TransformerPair { a: self.b.adjoint_field(), b: self.a.adjoint_field() }
    }
}

/// Convenience wrapper for [`TransformerPair::apply`].
pub fn ipt_apply(pair: &TransformerPair, x: &Operator) -> Result<Operator> {
    pair.apply(x)
}

/// Convenience wrapper for [`TransformerPair::defect`].
pub fn defect(pair: &TransformerPair, x: &Operator) -> Result<Operator> {
    pair.defect(x)
}

/// Convenience wrapper for [`TransformerPair::korkine_residual`].
pub fn korkine_residual(pair: &TransformerPair, x: &Operator) -> Result<f64> {
    pair.korkine_residual(x)
}

/// `|||Σ w A_i* X A_i||| / |||Σ w A_i* A_i|||` for a contraction `X`; at most one,
/// with equality at `X = I`.
pub fn transformer_norm_ratio(f: &OperatorField, x: &Operator, g: &GaugeSpec) -> Result<f64> {
    if x.dim() != f.dim() {
        return Err(Error::DimMismatch { expected: f.dim(), found: x.dim() });
    }
    let xn = x.op_norm();
    if xn > 1.0 + 1e-10 {
        return Err(Error::InvalidParams(format!("X must be a contraction, ‖X‖ = {xn}")));
    }
    let den = ui_norm(&f.second_moment(Side::Left), g)?;
    if den < 1e-14 {
        return Err(Error::Degenerate(format!("field second moment has norm {den:.3e}")));
    }
    let mut num = Operator::zeros(f.dim());
    for atom in f.atoms() {
        num = num + (&(&atom.op.adjoint() * x) * &atom.op).scale_real(atom.weight);
    }
    Ok(ui_norm(&num, g)? / den)
}
