//! Seeded random instances satisfying each theorem's hypotheses.
//!
//! Randomness comes from ChaCha8 keyed by a 64-bit seed. Per-trial seeds are
//! derived with [`stream_seed`], normals with Box–Muller, so the output depends
//! only on the seed and the code in this file.

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Atom, OperatorField};
use crate::linalg::{loewner_leq, psd_power, HermitianEigen, Operator, C64};

/// Identifies the generator, the stream split and the normal transform.
pub const PRNG_ID: &str = "chacha8-splitmix64-boxmuller/v1";
pub const MAX_DIM: usize = 16;
pub const MAX_ATOMS: usize = 64;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// `splitmix64(splitmix64(seed ⊕ fnv1a(tag)) ⊕ trial)`.
pub fn stream_seed(campaign_seed: u64, tag: &str, trial: u64) -> u64 {
    splitmix64(splitmix64(campaign_seed ^ fnv1a(tag)) ^ trial)
}

/// A seeded source of uniforms, normals and random matrices.
pub struct Sampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        let span = (hi - lo + 1) as u64;
        lo + (self.rng.next_u64() % span) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard normal via Box–Muller; the second variate of each pair is kept.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }

    /// `(g₁ + i g₂)/√2`, unit variance.
    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal();
        let im = self.normal();
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Entries i.i.d. complex normal times `spread`.
    pub fn ginibre(&mut self, d: usize, spread: f64) -> Operator {
        let m = DMatrix::from_fn(d, d, |_, _| self.complex_normal() * spread);
        Operator::new(m).expect("finite square matrix")
    }

    /// Haar-distributed unitary: `Q Λ` from `G = QR` with `Λ` the phases of `diag R`.
    pub fn haar_unitary(&mut self, d: usize) -> Operator {
        let g = self.ginibre(d, 1.0).into_matrix();
        let qr = g.qr();
        let (mut q, r) = qr.unpack();
        for c in 0..d {
            let rc = r[(c, c)];
            let phase = if rc.norm() > 0.0 { rc / rc.norm() } else { C64::new(1.0, 0.0) };
            for row in 0..d {
                q[(row, c)] *= phase;
            }
        }
        Operator::new(q).expect("finite square matrix")
    }

    /// `(G + G*)/2` with a complex Ginibre `G`.
    pub fn hermitian(&mut self, d: usize, spread: f64) -> Operator {
        self.ginibre(d, spread).hermitian_part()
    }

    /// Uniform weights, or random weights in `[0.05, 1.05)` normalised to one.
    pub fn weights(&mut self, n: usize, random: bool) -> Vec<f64> {
        if !random {
            return vec![1.0 / n as f64; n];
        }
        let raw: Vec<f64> = (0..n).map(|_| 0.05 + self.uniform()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// `G/‖G‖ · u` with `u` uniform on `[0, 1]`; the zero operator when `spread = 0`.
    pub fn contraction(&mut self, d: usize, spread: f64) -> Operator {
        let g = self.ginibre(d, 1.0);
        let u = self.uniform();
        if spread == 0.0 {
            return Operator::zeros(d);
        }
        let n = g.op_norm();
        let x = g.scale_real(u / n);
        let m = x.op_norm();
        if m > 1.0 {
            x.scale_real(1.0 / m)
        } else {
            x
        }
    }

    /// Random complex diagonals conjugated by the unitary `u`.
    pub fn commuting_normal_in(&mut self, u: &Operator, spec: &GenSpec) -> Result<OperatorField> {
        let d = u.dim();
        let w = self.weights(spec.atoms, spec.random_weights);
        let mut ops = Vec::with_capacity(spec.atoms);
        for _ in 0..spec.atoms {
            let diag: Vec<C64> = (0..d)
                .map(|_| {
                    if spec.hermitian {
                        C64::new(self.normal() * spec.spread, 0.0)
                    } else {
                        self.complex_normal() * spec.spread
                    }
                })
                .collect();
            let a = &(u * &Operator::from_diagonal(&diag)) * &u.adjoint();
            ops.push(if spec.hermitian { a.hermitian_part() } else { a });
        }
        OperatorField::probability(&w, ops)
    }

    /// Draws a field of the kind described by `spec`, ignoring `spec.seed`.
    pub fn field(&mut self, spec: &GenSpec) -> Result<OperatorField> {
        spec.validate()?;
        match &spec.kind {
            GenKind::CommutingNormal => {
                let u = self.haar_unitary(spec.dim);
                self.commuting_normal_in(&u, spec)
            }
            GenKind::SelfadjointBounded { c, d } => self.selfadjoint_bounded(spec, c, d),
            GenKind::General | GenKind::Contraction => {
                let w = self.weights(spec.atoms, spec.random_weights);
                let ops = (0..spec.atoms)
                    .map(|_| {
                        if matches!(spec.kind, GenKind::Contraction) {
                            self.contraction(spec.dim, spec.spread)
                        } else if spec.hermitian {
                            self.hermitian(spec.dim, spec.spread)
                        } else {
                            self.ginibre(spec.dim, spec.spread)
                        }
                    })
                    .collect();
                OperatorField::probability(&w, ops)
            }
        }
    }

    /// A value in `[0, 1]` whose ends snap to 0 or 1 with probability ¼ each.
    fn unit_interval(&mut self) -> (f64, f64) {
        let mut lo = self.uniform_in(0.0, 0.5);
        let mut hi = self.uniform_in(0.5, 1.0);
        if self.bernoulli(0.25) {
            lo = 0.0;
        }
        if self.bernoulli(0.25) {
            hi = 1.0;
        }
        (lo, hi)
    }

    fn selfadjoint_bounded(&mut self, spec: &GenSpec, c: &Operator, d: &Operator) -> Result<OperatorField> {
        let gap = d.checked_sub(c)?;
        if !loewner_leq(c, d, 1e-10)? {
            return Err(Error::Hypothesis("generator bounds need C <= D".into()));
        }
        let s = psd_power(&gap.hermitian_part(), 0.5)?;
        let w = self.weights(spec.atoms, spec.random_weights);
        let mut ops = Vec::with_capacity(spec.atoms);
        for _ in 0..spec.atoms {
            let (lo, hi) = self.unit_interval();
            let p = if spec.dim == 1 {
                // Half the scalars sit on an end of [lo, hi] so sharp two-point instances occur.
                let v = if self.bernoulli(0.5) { lo } else { hi };
                Operator::real_scalar(if self.bernoulli(0.5) { v } else { self.uniform_in(lo, hi) })
            } else {
                let eig = HermitianEigen::of(&self.hermitian(spec.dim, 1.0))?;
                let (min, max) = (eig.min(), eig.max());
                eig.reconstruct(|l| if max > min { lo + (hi - lo) * (l - min) / (max - min) } else { lo })
            };
            ops.push((c + &(&(&s * &p) * &s)).hermitian_part());
        }
        OperatorField::probability(&w, ops)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GenKind {
    CommutingNormal,
    SelfadjointBounded { c: Operator, d: Operator },
    General,
    Contraction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub dim: usize,
    pub atoms: usize,
    pub kind: GenKind,
    #[serde(default = "unit")]
    pub spread: f64,
    #[serde(default)]
    pub random_weights: bool,
    /// Real spectra for commuting normal fields, Hermitian atoms for general ones.
    #[serde(default)]
    pub hermitian: bool,
}

fn unit() -> f64 {
    1.0
}

impl GenSpec {
    pub fn new(seed: u64, dim: usize, atoms: usize, kind: GenKind) -> Self {
        GenSpec { seed, dim, atoms, kind, spread: 1.0, random_weights: false, hermitian: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::InvalidParams(format!("dim must be in 1..={MAX_DIM}, got {}", self.dim)));
        }
        if self.atoms == 0 || self.atoms > MAX_ATOMS {
            return Err(Error::InvalidParams(format!("atoms must be in 1..={MAX_ATOMS}, got {}", self.atoms)));
        }
        if !self.spread.is_finite() || self.spread < 0.0 {
            return Err(Error::InvalidParams(format!("spread must be finite and nonnegative, got {}", self.spread)));
        }
        if let GenKind::SelfadjointBounded { c, d } = &self.kind {
            if c.dim() != self.dim || d.dim() != self.dim {
                return Err(Error::DimMismatch { expected: self.dim, found: c.dim().max(d.dim()) });
            }
        }
        Ok(())
    }
}

fn expect_kind(spec: &GenSpec, ok: bool, name: &str) -> Result<()> {
    if !ok {
        return Err(Error::InvalidParams(format!("{name} called with kind {:?}", spec.kind)));
    }
    Ok(())
}

pub fn gen_commuting_normal(spec: &GenSpec) -> Result<OperatorField> {
    expect_kind(spec, matches!(spec.kind, GenKind::CommutingNormal), "gen_commuting_normal")?;
    Sampler::new(spec.seed).field(spec)
}

pub fn gen_selfadjoint_bounded(spec: &GenSpec) -> Result<OperatorField> {
    expect_kind(spec, matches!(spec.kind, GenKind::SelfadjointBounded { .. }), "gen_selfadjoint_bounded")?;
    Sampler::new(spec.seed).field(spec)
}

pub fn gen_general(spec: &GenSpec) -> Result<OperatorField> {
    expect_kind(spec, matches!(spec.kind, GenKind::General), "gen_general")?;
    Sampler::new(spec.seed).field(spec)
}

pub fn gen_contraction(spec: &GenSpec) -> Result<Operator> {
    spec.validate()?;
    Ok(Sampler::new(spec.seed).contraction(spec.dim, spec.spread))
}

/// A field with the same weights whose atoms are all `op`.
pub fn constant_like(f: &OperatorField, op: &Operator) -> OperatorField {
    let atoms = f.atoms().iter().map(|a| Atom { weight: a.weight, op: op.clone() }).collect();
    OperatorField::derived(atoms, f.is_probability())
}
