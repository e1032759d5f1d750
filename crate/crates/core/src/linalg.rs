//! Dense complex matrix primitives.
//!
//! Every operator acts on `C^d`; the wrappers here keep the square and
//! finite-entry invariants and expose the spectral calculus the rest of the
//! crate relies on: adjoints, singular values, the modulus `|X|`, fractional
//! powers of positive semidefinite operators and Loewner-order tests.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Relative tolerance for Hermitian detection: `‖X − X*‖ ≤ tol·(1 + ‖X‖)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues of magnitude up to `PSD_CLIP_TOL·‖P‖` are clipped to zero.
pub const PSD_CLIP_TOL: f64 = 1e-10;

/// Eigenvalues (or squared singular values) below this multiple of
/// `dim·ε·scale` are treated as exact zeros by the functional calculus.
const NOISE_FLOOR_FACTOR: f64 = 4.0;

fn noise_floor(dim: usize, scale: f64) -> f64 {
    NOISE_FLOOR_FACTOR * dim.max(1) as f64 * f64::EPSILON * scale
}

/// A `d×d` complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Operator(m))
    }

    /// Builds from row-major rows; rejects ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Ragged { row: i, expected: d, found: row.len() });
            }
        }
        Self::new(DMatrix::from_fn(d, d, |r, c| rows[r][c]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        Operator(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Operator(DMatrix::identity(dim, dim))
    }

    pub fn scalar(z: C64) -> Self {
        Operator(DMatrix::from_element(1, 1, z))
    }

    pub fn real_scalar(x: f64) -> Self {
        Self::scalar(C64::new(x, 0.0))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let d = diag.len();
        Operator(DMatrix::from_fn(d, d, |r, c| if r == c { diag[r] } else { C64::new(0.0, 0.0) }))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let diag: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator {
        Operator(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, z: C64) -> Operator {
        Operator(&self.0 * z)
    }

    pub fn scale_real(&self, x: f64) -> Operator {
        Operator(self.0.map(|z| z * x))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator (spectral) norm, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        largest_singular_value(&self.0)
    }

    /// `(X + X*)/2`.
    pub fn hermitian_part(&self) -> Operator {
        Operator((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// `‖X − X*‖` in operator norm.
    pub fn hermitian_defect(&self) -> f64 {
        let diff = &self.0 - self.0.adjoint();
        largest_singular_value(&diff)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = &self.0 - self.0.adjoint();
        let bound = tol * (1.0 + self.op_norm());
        // Frobenius dominates the spectral norm, so a small Frobenius defect settles it.
        frobenius(&diff) <= bound || largest_singular_value(&diff) <= bound
    }

    /// Commutator `XY − YX`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        Operator(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub(crate) fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(self * other)
    }

    /// Entrywise closeness in operator norm.
    pub fn distance(&self, other: &Operator) -> f64 {
        (self - other).op_norm()
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.0[(r, c)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                Operator(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                Operator(self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-&self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format_version: Option<u32>,
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let entries = (0..d)
            .map(|r| (0..d).map(|c| [self.0[(r, c)].re, self.0[(r, c)].im]).collect())
            .collect();
        MatrixRepr { format_version: None, dim: d, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.dim {
            return Err(serde::de::Error::custom(format!(
                "matrix has {} rows, dim is {}",
                repr.entries.len(),
                repr.dim
            )));
        }
        let rows: Vec<Vec<C64>> = repr
            .entries
            .iter()
            .map(|row| row.iter().map(|[re, im]| C64::new(*re, *im)).collect())
            .collect();
        Operator::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Singular values in nonincreasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum(Vec<f64>);

impl SingularSpectrum {
    /// Sorts nonincreasing and clamps tiny negatives (which SVD never emits) to zero.
    pub fn new(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        SingularSpectrum(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    /// Ky Fan partial sums `Σ_{n≤k} s_n` for `k = 1..len`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.0
            .iter()
            .scan(0.0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }

    /// Spectrum of `|X|^θ`; values at the noise floor count as zero (`0⁰ = 0`).
    pub fn powf(&self, theta: f64) -> SingularSpectrum {
        let floor = noise_floor(self.0.len(), self.largest());
        SingularSpectrum(
            self.0
                .iter()
                .map(|&s| if s <= floor { 0.0 } else { s.powf(theta) })
                .collect(),
        )
    }
}

fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn svd_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    m.clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .map(|svd| svd.singular_values.iter().copied().collect())
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))
}

fn largest_singular_value(m: &DMatrix<C64>) -> f64 {
    // The unbounded-iteration SVD converges for finite input; NaN only arises from NaN.
    svd_values(m)
        .map(|v| v.into_iter().fold(0.0, f64::max))
        .unwrap_or(f64::NAN)
}

/// Thin singular value decomposition `M = U Σ V*` of a (possibly rectangular) matrix.
pub(crate) struct Svd {
    pub u: DMatrix<C64>,
    pub values: Vec<f64>,
    pub v_adjoint: DMatrix<C64>,
}

pub(crate) fn svd_full(m: &DMatrix<C64>) -> Result<Svd> {
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD returned no U".into()))?;
    let v_adjoint = svd.v_t.ok_or_else(|| Error::Numerical("SVD returned no V*".into()))?;
    Ok(Svd { u, values: svd.singular_values.iter().copied().collect(), v_adjoint })
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    /// Decomposes the Hermitian part of `x`; callers are responsible for the
    /// Hermitian precondition.
    pub fn of(x: &Operator) -> Result<Self> {
        let h = x.hermitian_part().into_matrix();
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        let d = x.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(HermitianEigen { values, vectors })
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U*`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> Operator {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for c in 0..d {
            let fc = f(self.values[c]);
            for r in 0..d {
                scaled[(r, c)] *= fc;
            }
        }
        Operator(&scaled * self.vectors.adjoint()).hermitian_part()
    }
}

fn require_hermitian(x: &Operator) -> Result<()> {
    if !x.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian { asymmetry: x.hermitian_defect() });
    }
    Ok(())
}

/// Singular values of `x`, nonincreasing.
pub fn singular_values(x: &Operator) -> Result<SingularSpectrum> {
    Ok(SingularSpectrum::new(svd_values(x.matrix())?))
}

/// The modulus `|X| = (X*X)^{1/2}`, computed as `V Σ V*` from `X = U Σ V*`.
pub fn abs_op(x: &Operator) -> Result<Operator> {
    let svd = svd_full(x.matrix())?;
    Ok(right_gram_power(&svd, x.dim(), 0.5))
}

/// `(M*M)^α = V Σ^{2α} V*` for the thin SVD of `M`; `α = 0` yields the support projection.
fn right_gram_power(svd: &Svd, cols: usize, alpha: f64) -> Operator {
    let smax = svd.values.iter().copied().fold(0.0, f64::max);
    let floor = noise_floor(svd.u.nrows().max(cols), smax);
    let v = svd.v_adjoint.adjoint();
    let mut scaled = v.clone();
    for (c, &s) in svd.values.iter().enumerate() {
        let f = if s <= floor {
            0.0
        } else if alpha == 0.0 {
            1.0
        } else {
            s.powf(2.0 * alpha)
        };
        for r in 0..cols {
            scaled[(r, c)] *= f;
        }
    }
    Operator(&scaled * &svd.v_adjoint).hermitian_part()
}

/// Fractional power `P^α` of a positive semidefinite operator.
///
/// Negative eigenvalues within `PSD_CLIP_TOL·‖P‖` are clipped to zero, larger
/// ones are rejected. `α = 0` gives the support projection (`0⁰ = 0`).
pub fn psd_power(p: &Operator, alpha: f64) -> Result<Operator> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParams(format!("psd_power exponent must be a finite nonnegative real, got {alpha}")));
    }
    psd_power_scaled(p, alpha, 0.0)
}

/// [`psd_power`] with clipping measured against `max(‖P‖, reference)`, for
/// operators formed as a difference of terms of size `reference`.
pub fn psd_power_scaled(p: &Operator, alpha: f64, reference: f64) -> Result<Operator> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParams(format!("psd_power exponent must be a finite nonnegative real, got {alpha}")));
    }
    require_hermitian(p)?;
    let eig = HermitianEigen::of(p)?;
    let scale = eig.values.iter().fold(reference.abs(), |m, v| m.max(v.abs()));
    if eig.min() < -PSD_CLIP_TOL * scale {
        return Err(Error::NotPsd { min_eigenvalue: eig.min() });
    }
    let floor = noise_floor(p.dim(), scale);
    Ok(eig.reconstruct(|l| {
        if l <= floor {
            0.0
        } else if alpha == 0.0 {
            1.0
        } else {
            l.powf(alpha)
        }
    }))
}

/// `A ≤ B` in the Loewner order: `λ_min(B − A) ≥ −tol`.
pub fn loewner_leq(a: &Operator, b: &Operator, tol: f64) -> Result<bool> {
    a.check_same_dim(b)?;
    require_hermitian(a)?;
    require_hermitian(b)?;
    let eig = HermitianEigen::of(&(b - a))?;
    Ok(eig.min() >= -tol)
}

/// A rectangular `(k·d)×d` block column `[M_1; …; M_k]`.
///
/// Gram-type operators `Σ M_i* M_i` are evaluated through the SVD of the stack,
/// which keeps fractional powers accurate when the Gram matrix is ill-conditioned.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockColumn {
    blocks: usize,
    dim: usize,
    matrix: DMatrix<C64>,
}

impl BlockColumn {
    pub fn from_blocks(blocks: &[Operator]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidParams("block column needs at least one block".into()))?;
        let d = first.dim();
        let mut matrix = DMatrix::zeros(blocks.len() * d, d);
        for (i, b) in blocks.iter().enumerate() {
            if b.dim() != d {
                return Err(Error::DimMismatch { expected: d, found: b.dim() });
            }
            matrix.view_mut((i * d, 0), (d, d)).copy_from(b.matrix());
        }
        Ok(BlockColumn { blocks: blocks.len(), dim: d, matrix })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn block(&self, i: usize) -> Operator {
        Operator(self.matrix.view((i * self.dim, 0), (self.dim, self.dim)).into_owned())
    }

    /// `K* K`.
    pub fn gram(&self) -> Operator {
        Operator(self.matrix.adjoint() * &self.matrix)
    }

    /// `(K* K)^α`; `α = 1/2` is the modulus `|K|`.
    pub fn gram_power(&self, alpha: f64) -> Result<Operator> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParams(format!("gram exponent must be a finite nonnegative real, got {alpha}")));
        }
        let svd = svd_full(&self.matrix)?;
        Ok(right_gram_power(&svd, self.dim, alpha))
    }

    pub fn singular_values(&self) -> Result<SingularSpectrum> {
        Ok(SingularSpectrum::new(svd_values(&self.matrix)?))
    }

    pub fn op_norm(&self) -> f64 {
        largest_singular_value(&self.matrix)
    }
}
