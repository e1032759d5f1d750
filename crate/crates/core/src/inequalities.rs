//! One checker per inequality. Each evaluates both sides as displayed and returns
//! an [`InequalityReport`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chebyshev::{chebyshev_radius, diameter, SolverOptions};
use crate::error::{Error, Result};
use crate::fields::{Half, OperatorField, Side, StarPattern};
use crate::generators::Sampler;
use crate::linalg::{singular_values, HermitianEigen, Operator, SingularSpectrum};
use crate::norms::{ui_norm, GaugeSpec};
use crate::transformers::TransformerPair;

pub const TOL_ABS: f64 = 1e-10;
pub const TOL_REL: f64 = 1e-9;
/// Tolerance for the commuting-normal and order-interval hypotheses.
pub const HYPOTHESIS_TOL: f64 = 1e-10;
/// Allowed deviation in `1/p = 1/(2q) + 1/(2r)`.
pub const EXPONENT_TOL: f64 = 1e-12;
/// Perturbation scales tried around the mean by [`minimizer_check`].
pub const PERTURBATION_SCALES: [f64; 3] = [1e-3, 1e-1, 1.0];

/// `lhs ≤ rhs + abs + rel·|rhs|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { abs: TOL_ABS, rel: TOL_REL }
    }
}

impl Tolerances {
    pub fn holds(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs + self.abs + self.rel * rhs.abs()
    }
}

/// `Assert` refuses inputs outside a checker's hypotheses; `Explore` evaluates
/// them anyway and marks the report as not asserted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Assert,
    Explore,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CheckOptions {
    pub mode: Mode,
    pub tol: Tolerances,
}

impl CheckOptions {
    pub fn explore() -> Self {
        CheckOptions { mode: Mode::Explore, ..Default::default() }
    }

    /// Whether the report is asserted, or the hypothesis error in assert mode.
    fn hypothesis(&self, holds: bool, what: impl FnOnce() -> String) -> Result<bool> {
        match (holds, self.mode) {
            (true, _) => Ok(true),
            (false, Mode::Explore) => Ok(false),
            (false, Mode::Assert) => Err(Error::Hypothesis(what())),
        }
    }
}

/// A secondary inequality carried by a report; the report passes only if every link does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ratio: f64,
    pub pass: bool,
    /// False for exploration reports, whose `pass` is informational.
    pub asserted: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<Link>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl InequalityReport {
    pub fn new(name: &str, lhs: f64, rhs: f64, tol: &Tolerances) -> Self {
        InequalityReport {
            name: name.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
            ratio: ratio(lhs, rhs),
            pass: tol.holds(lhs, rhs),
            asserted: true,
            links: Vec::new(),
            params: BTreeMap::new(),
            details: BTreeMap::new(),
        }
    }

    /// Adds `lhs ≤ rhs` as a link judged with `tol`.
    pub fn link(&mut self, name: &str, lhs: f64, rhs: f64, tol: &Tolerances) {
        let pass = tol.holds(lhs, rhs);
        self.push_link(Link { name: name.into(), lhs, rhs, pass });
    }

    pub fn push_link(&mut self, link: Link) {
        self.pass &= link.pass;
        self.links.push(link);
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.into(), to_value(value));
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(key.into(), to_value(value));
    }

    /// False only for an asserted report whose inequality or links fail.
    pub fn asserted_pass(&self) -> bool {
        !self.asserted || self.pass
    }
}

/// `lhs / max(rhs, 1e-300)`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    lhs / rhs.max(1e-300)
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

fn check_x(dim: usize, x: &Operator) -> Result<()> {
    if x.dim() != dim {
        return Err(Error::DimMismatch { expected: dim, found: x.dim() });
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParams(format!("{name} must be a finite positive real, got {v}")));
    }
    Ok(())
}

fn base_params(r: &mut InequalityReport, dim: usize, atoms: usize) {
    r.param("d", dim);
    r.param("n", atoms);
}

/// Largest `S_k(x) − S_k(y)` over the Ky Fan partial sums.
fn fan_excess(x: &SingularSpectrum, y: &SingularSpectrum) -> f64 {
    x.partial_sums()
        .iter()
        .zip(y.partial_sums())
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Ky Fan dominance of `defect` by `bound` as a report link.
fn fan_link(defect: &Operator, bound: &Operator, tol: &Tolerances) -> Result<Link> {
    let (sx, sy) = (singular_values(defect)?, singular_values(bound)?);
    let excess = fan_excess(&sx, &sy);
    let total: f64 = sy.values().iter().sum();
    Ok(Link {
        name: "fan_dominance".into(),
        lhs: excess,
        rhs: 0.0,
        pass: excess <= tol.abs + tol.rel * total,
    })
}

fn commuting_normal(ops: &[&OperatorField]) -> Result<bool> {
    let all: Vec<Operator> = ops.iter().flat_map(|f| f.ops().cloned()).collect();
    Ok(OperatorField::uniform(all)?.check_commuting_normal(HYPOTHESIS_TOL))
}

/// `|||defect||| ≤ |||√var(A)·X·√var(B)|||` for commuting normal fields, with the
/// Ky Fan dominance that makes the bound hold in every unitarily invariant norm.
pub fn landau_ui(pair: &TransformerPair, x: &Operator, g: &GaugeSpec, opts: &CheckOptions) -> Result<InequalityReport> {
    check_x(pair.dim(), x)?;
    let (a, b) = (pair.a(), pair.b());
    a.require_probability("landau_ui")?;
    let asserted = opts.hypothesis(
        a.check_commuting_normal(HYPOTHESIS_TOL) && b.check_commuting_normal(HYPOTHESIS_TOL),
        || "landau_ui needs both fields to consist of commuting normal operators".into(),
    )?;
    let defect = pair.defect(x)?;
    let bound = &(&a.variance_power(Side::Left, 0.5)? * x) * &b.variance_power(Side::Left, 0.5)?;
    let mut r = InequalityReport::new("landau_ui", ui_norm(&defect, g)?, ui_norm(&bound, g)?, &opts.tol);
    r.asserted = asserted;
    r.push_link(fan_link(&defect, &bound, &opts.tol)?);
    base_params(&mut r, pair.dim(), a.len());
    r.param("gauge", g.label());
    Ok(r)
}

/// Landau inequality for the product families `A_s C_t` and `B_s D_t` over `μ×ν`,
/// with the bound assembled from the factor moments.
pub fn landau_product(
    fa: &OperatorField,
    fc: &OperatorField,
    fb: &OperatorField,
    fd: &OperatorField,
    x: &Operator,
    g: &GaugeSpec,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    TransformerPair::new(fa.clone(), fb.clone())?;
    TransformerPair::new(fc.clone(), fd.clone())?;
    check_x(fa.dim(), x)?;
    let asserted = opts.hypothesis(commuting_normal(&[fa, fc])? && commuting_normal(&[fb, fd])?, || {
        "landau_product needs {A_s, C_t} and {B_s, D_t} to consist of commuting normal operators".into()
    })?;
    let pair = TransformerPair::new(fa.product_field(fc)?, fb.product_field(fd)?)?;
    let defect = pair.defect(x)?;
    let direct_a = pair.a().variance_power(Side::Left, 0.5)?;
    let direct_b = pair.b().variance_power(Side::Left, 0.5)?;
    let factored = |f: &OperatorField, h: &OperatorField, direct: &Operator| -> Result<Operator> {
        let moments = (&f.second_moment(Side::Left) * &h.second_moment(Side::Left)).hermitian_part();
        let m = &f.gelfand_mean() * &h.gelfand_mean();
        let reference = moments.op_norm();
        let v = moments - (&m.adjoint() * &m).hermitian_part();
        match crate::linalg::psd_power_scaled(&v, 0.5, reference) {
            Ok(root) => Ok(root),
            Err(Error::NotPsd { .. }) if !asserted => Ok(direct.clone()),
            Err(e) => Err(e),
        }
    };
    let root_a = factored(fa, fc, &direct_a)?;
    let root_b = factored(fb, fd, &direct_b)?;
    let bound = &(&root_a * x) * &root_b;
    let mut r = InequalityReport::new("landau_product", ui_norm(&defect, g)?, ui_norm(&bound, g)?, &opts.tol);
    r.asserted = asserted;
    r.detail(
        "factorization_residual",
        root_a.distance(&direct_a).max(root_b.distance(&direct_b)),
    );
    base_params(&mut r, fa.dim(), fa.len());
    r.param("m", fc.len());
    r.param("gauge", g.label());
    Ok(r)
}

fn mean_power(m: &Operator, stars: usize, plain: usize) -> Operator {
    let mut acc = Operator::identity(m.dim());
    let ma = m.adjoint();
    for _ in 0..stars {
        acc = &acc * &ma;
    }
    for _ in 0..plain {
        acc = &acc * m;
    }
    acc
}

/// The `n`-fold power inequality over `Ωⁿ` for a star pattern of length `2n`.
///
/// The left side subtracts `(m_A*)^i m_A^{n−i} X (m_B*)^j m_B^{n−j}`. The asserted
/// bound is the Landau bound of the power fields themselves. The bound
/// `var(A)^{n/2} X var(B)^{n/2}` is reported as `rhs_literal` with its own verdict.
pub fn landau_power(
    fa: &OperatorField,
    fb: &OperatorField,
    x: &Operator,
    pattern: &StarPattern,
    g: &GaugeSpec,
    budget: usize,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    TransformerPair::new(fa.clone(), fb.clone())?;
    check_x(fa.dim(), x)?;
    fa.require_probability("landau_power")?;
    let mut asserted = opts.hypothesis(
        fa.check_commuting_normal(HYPOTHESIS_TOL) && fb.check_commuting_normal(HYPOTHESIS_TOL),
        || "landau_power needs both fields to consist of commuting normal operators".into(),
    )?;
    let n = pattern.n();
    let (i, j) = (pattern.star_count(Half::First), pattern.star_count(Half::Second));
    let (ma, mb) = (fa.gelfand_mean(), fb.gelfand_mean());
    let pa = fa.power_field(pattern, Half::First, budget)?;
    let pb = fb.power_field(pattern, Half::Second, budget)?;
    let pair = TransformerPair::new(pa, pb)?;
    let means = &(&mean_power(&ma, i, n - i) * x) * &mean_power(&mb, j, n - j);
    let diff = pair.apply(x)? - means;
    let ordered = &(&pair.a().gelfand_mean() * x) * &pair.b().gelfand_mean();
    let order_residual = (pair.apply(x)? - ordered).distance(&diff);
    let mixed = (0 < i && i < n) || (0 < j && j < n);
    let scale = (1.0 + ma.op_norm()) * (1.0 + mb.op_norm());
    let means_commute = ma.commutator(&ma.adjoint()).op_norm() <= HYPOTHESIS_TOL * scale * scale
        && mb.commutator(&mb.adjoint()).op_norm() <= HYPOTHESIS_TOL * scale * scale;
    if mixed && !means_commute {
        asserted = false;
    }

    let bound = &(&pair.a().variance_power(Side::Left, 0.5)? * x) * &pair.b().variance_power(Side::Left, 0.5)?;
    let half_n = n as f64 / 2.0;
    let literal = &(&fa.variance_power(Side::Left, half_n)? * x) * &fb.variance_power(Side::Left, half_n)?;
    let lhs = ui_norm(&diff, g)?;
    let mut r = InequalityReport::new("landau_power", lhs, ui_norm(&bound, g)?, &opts.tol);
    r.asserted = asserted;
    let rhs_literal = ui_norm(&literal, g)?;
    r.detail("rhs_literal", rhs_literal);
    r.detail("pass_literal", opts.tol.holds(lhs, rhs_literal));
    r.detail("mean_order_residual", order_residual);
    base_params(&mut r, fa.dim(), fa.len());
    r.param("pattern", pattern.to_string());
    r.param("gauge", g.label());
    Ok(r)
}

/// `M^{1/(2s)}` for `M = Σ w |W^{(s−1)/2} K_i|²`, where `K_i` are the centred atoms
/// and `W = Σ w K_i K_i*`.
fn schatten_factor(centred: &OperatorField, s: f64) -> Result<Operator> {
    let inner = centred.embed_side(Side::Right)?.gram_power((s - 1.0) / 2.0)?;
    let blocks: Vec<Operator> = centred
        .atoms()
        .iter()
        .map(|a| (&inner * &a.op).scale_real(a.weight.sqrt()))
        .collect();
    crate::linalg::BlockColumn::from_blocks(&blocks)?.gram_power(1.0 / (2.0 * s))
}

/// Schatten-`p` Landau inequality with `1/p = 1/(2q) + 1/(2r)`, no normality needed.
pub fn landau_schatten(
    pair: &TransformerPair,
    x: &Operator,
    p: f64,
    q: f64,
    r: f64,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    check_x(pair.dim(), x)?;
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        if !(v.is_finite() && v >= 1.0) {
            return Err(Error::InvalidParams(format!("{name} must be a finite real ≥ 1, got {v}")));
        }
    }
    let mismatch = (1.0 / p - 1.0 / (2.0 * q) - 1.0 / (2.0 * r)).abs();
    if mismatch > EXPONENT_TOL {
        return Err(Error::InvalidParams(format!(
            "exponents violate 1/p = 1/(2q) + 1/(2r) by {mismatch:.3e}"
        )));
    }
    pair.a().require_probability("landau_schatten")?;
    let g = GaugeSpec::schatten(p)?;
    let defect = pair.defect(x)?;
    let left = schatten_factor(&pair.a().centered(), q)?;
    let right = schatten_factor(&pair.b().centered().adjoint_field(), r)?;
    let bound = &(&left * x) * &right;
    let mut rep = InequalityReport::new("landau_schatten", ui_norm(&defect, &g)?, ui_norm(&bound, &g)?, &opts.tol);
    base_params(&mut rep, pair.dim(), pair.a().len());
    rep.param("p", p);
    rep.param("q", q);
    rep.param("r", r);
    Ok(rep)
}

fn cross_moment(fa: &OperatorField, fb: &OperatorField) -> Operator {
    let mut acc = Operator::zeros(fa.dim());
    for (a, b) in fa.atoms().iter().zip(fb.atoms()) {
        acc = acc + (&a.op.adjoint() * &b.op).scale_real(a.weight);
    }
    acc
}

/// `|||(Σ w A*A)^θ|||` from the singular values of the embedding.
fn moment_gauge(f: &OperatorField, theta: f64, g: &GaugeSpec) -> Result<f64> {
    Ok(g.evaluate(&f.embed()?.singular_values()?.powf(2.0 * theta)))
}

fn modulus_gauge(x: &Operator, theta: f64, g: &GaugeSpec) -> Result<f64> {
    Ok(g.evaluate(&singular_values(x)?.powf(theta)))
}

/// `||| |∫A*B|^θ ||| ≤ ||| (∫A*A)^θ |||^½ · ||| (∫B*B)^θ |||^½`.
pub fn cauchy_schwarz_ui(
    fa: &OperatorField,
    fb: &OperatorField,
    theta: f64,
    g: &GaugeSpec,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    positive("theta", theta)?;
    TransformerPair::new(fa.clone(), fb.clone())?;
    let lhs = modulus_gauge(&cross_moment(fa, fb), theta, g)?;
    let rhs = moment_gauge(fa, theta, g)?.sqrt() * moment_gauge(fb, theta, g)?.sqrt();
    let mut r = InequalityReport::new("cauchy_schwarz_ui", lhs, rhs, &opts.tol);
    base_params(&mut r, fa.dim(), fa.len());
    r.param("theta", theta);
    r.param("gauge", g.label());
    Ok(r)
}

fn covariance(fa: &OperatorField, fb: &OperatorField) -> Operator {
    cross_moment(fa, fb) - &fa.gelfand_mean().adjoint() * &fb.gelfand_mean()
}

/// `||| |∫A*B − ∫A*∫B|^θ |||² ≤ ||| var(A)^θ ||| · ||| var(B)^θ |||`.
pub fn landau_ov(
    fa: &OperatorField,
    fb: &OperatorField,
    theta: f64,
    g: &GaugeSpec,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    positive("theta", theta)?;
    TransformerPair::new(fa.clone(), fb.clone())?;
    fa.require_probability("landau_ov")?;
    let lhs = modulus_gauge(&covariance(fa, fb), theta, g)?.powi(2);
    let rhs = moment_gauge(&fa.centered(), theta, g)? * moment_gauge(&fb.centered(), theta, g)?;
    let mut r = InequalityReport::new("landau_ov", lhs, rhs, &opts.tol);
    base_params(&mut r, fa.dim(), fa.len());
    r.param("theta", theta);
    r.param("gauge", g.label());
    Ok(r)
}

fn hilbert_schmidt_variance(f: &OperatorField) -> f64 {
    f.centered().atoms().iter().map(|a| a.weight * a.op.frobenius_norm().powi(2)).sum()
}

/// `|tr T|² ≤ ‖T‖₁² ≤ (∫‖A‖₂² − ‖∫A‖₂²)(∫‖B‖₂² − ‖∫B‖₂²)` for the covariance `T`.
pub fn trace_landau(fa: &OperatorField, fb: &OperatorField, opts: &CheckOptions) -> Result<InequalityReport> {
    TransformerPair::new(fa.clone(), fb.clone())?;
    fa.require_probability("trace_landau")?;
    let t = covariance(fa, fb);
    let trace_sq = t.trace().norm_sqr();
    let trace_norm_sq = singular_values(&t)?.values().iter().sum::<f64>().powi(2);
    let product = hilbert_schmidt_variance(fa) * hilbert_schmidt_variance(fb);
    let mut r = InequalityReport::new("trace_landau", trace_sq, product, &opts.tol);
    r.link("trace_le_trace_norm", trace_sq, trace_norm_sq, &opts.tol);
    r.link("trace_norm_le_variances", trace_norm_sq, product, &opts.tol);
    r.detail("trace_sq", trace_sq);
    r.detail("trace_norm_sq", trace_norm_sq);
    r.detail("variance_product", product);
    base_params(&mut r, fa.dim(), fa.len());
    Ok(r)
}

/// Precomputed atom data for normalized defects over subsets.
struct SubsetDefect<'a> {
    pair: &'a TransformerPair,
    x: &'a Operator,
    axb: Vec<Operator>,
}

impl<'a> SubsetDefect<'a> {
    fn new(pair: &'a TransformerPair, x: &'a Operator) -> Self {
        let axb = pair
            .a()
            .ops()
            .zip(pair.b().ops())
            .map(|(a, b)| &(a * x) * b)
            .collect();
        SubsetDefect { pair, x, axb }
    }

    /// `(1/μ(δ))∫_δ AXB − (1/μ(δ))∫_δ A · X · (1/μ(δ))∫_δ B`.
    fn eval(&self, members: impl Iterator<Item = usize> + Clone) -> Operator {
        let d = self.pair.dim();
        let (a, b) = (self.pair.a().atoms(), self.pair.b().atoms());
        let mass: f64 = members.clone().map(|i| a[i].weight).sum();
        let (mut full, mut ma, mut mb) = (Operator::zeros(d), Operator::zeros(d), Operator::zeros(d));
        for i in members {
            let w = a[i].weight / mass;
            full = full + self.axb[i].scale_real(w);
            ma = ma + a[i].op.scale_real(w);
            mb = mb + b[i].op.scale_real(w);
        }
        full - &(&ma * self.x) * &mb
    }
}

fn mask_members(mask: u64, n: usize) -> impl Iterator<Item = usize> + Clone {
    (0..n).filter(move |&i| mask >> i & 1 == 1)
}

/// Options for [`gruss_ui`].
#[derive(Clone, Debug, PartialEq)]
pub struct GrussOptions {
    /// Maximum number of subsets evaluated.
    pub subset_budget: usize,
    /// Seed for the random subsets drawn when enumeration exceeds the budget.
    pub seed: u64,
    pub solver: SolverOptions,
}

impl Default for GrussOptions {
    fn default() -> Self {
        GrussOptions { subset_budget: 4096, seed: 0, solver: SolverOptions::default() }
    }
}

/// `sup_δ |||normalized defect on δ||| ≤ min{r∞(A) r∞(B), diam(A) diam(B)/2}·|||X|||`.
///
/// The supremum is exact when all `2ⁿ − 1` subsets fit in the budget; otherwise it
/// is a lower bound from the full set plus random subsets, flagged by `exhaustive`.
/// The radii are attained values. The same bound built from the certified lower
/// radii is reported as `rhs_certified`.
pub fn gruss_ui(
    pair: &TransformerPair,
    x: &Operator,
    g: &GaugeSpec,
    gopts: &GrussOptions,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    check_x(pair.dim(), x)?;
    if gopts.subset_budget == 0 {
        return Err(Error::InvalidParams("subset budget must be positive".into()));
    }
    let n = pair.a().len();
    let sd = SubsetDefect::new(pair, x);
    let total = if n < 64 { Some((1u64 << n) - 1) } else { None };
    let exhaustive = total.is_some_and(|t| t <= gopts.subset_budget as u64);
    let mut best = (0.0_f64, Vec::new());
    let mut evaluated = 0usize;
    let mut consider = |members: Vec<usize>, evaluated: &mut usize| -> Result<()> {
        *evaluated += 1;
        let v = ui_norm(&sd.eval(members.iter().copied()), g)?;
        if v > best.0 {
            best = (v, members);
        }
        Ok(())
    };
    if exhaustive {
        for mask in 1..=total.unwrap_or(0) {
            consider(mask_members(mask, n).collect(), &mut evaluated)?;
        }
    } else {
        consider((0..n).collect(), &mut evaluated)?;
        let mut rng = Sampler::new(gopts.seed);
        while evaluated < gopts.subset_budget {
            let members: Vec<usize> = (0..n).filter(|_| rng.bernoulli(0.5)).collect();
            if !members.is_empty() {
                consider(members, &mut evaluated)?;
            }
        }
    }

    let ra = chebyshev_radius(pair.a(), &gopts.solver)?;
    let rb = chebyshev_radius(pair.b(), &gopts.solver)?;
    let (da, db) = (diameter(pair.a()), diameter(pair.b()));
    let xn = ui_norm(x, g)?;
    let rhs = (ra.radius * rb.radius).min(da * db / 2.0) * xn;
    let rhs_certified = (ra.certified_lower * rb.certified_lower).min(da * db / 2.0) * xn;
    let mut r = InequalityReport::new("gruss_ui", best.0, rhs, &opts.tol);
    r.detail("exhaustive", exhaustive);
    r.detail("subsets_evaluated", evaluated);
    r.detail("argmax_subset", &best.1);
    r.detail("radius_a", ra.radius);
    r.detail("radius_b", rb.radius);
    r.detail("diameter_a", da);
    r.detail("diameter_b", db);
    r.detail("solver_gap", ra.gap().max(rb.gap()));
    r.detail("rhs_certified", rhs_certified);
    r.detail("pass_certified", opts.tol.holds(best.0, rhs_certified));
    base_params(&mut r, pair.dim(), n);
    r.param("gauge", g.label());
    r.param("subset_budget", gopts.subset_budget);
    Ok(r)
}

/// Order-interval bounds `C ≤ A_t ≤ D`, `E ≤ B_t ≤ F` for [`gruss_selfadjoint`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub c: Operator,
    pub d: Operator,
    pub e: Operator,
    pub f: Operator,
}

/// `‖ ‖(D−C)/2‖²·I − |m − (C+D)/2|² ‖^½`.
fn refined_factor(mean: &Operator, c: &Operator, d: &Operator) -> Result<f64> {
    let half = (d - c).op_norm() / 2.0;
    let offset = mean - &(c + d).scale_real(0.5);
    let sq = (&offset.adjoint() * &offset).hermitian_part();
    let inner = Operator::identity(mean.dim()).scale_real(half * half) - sq;
    let eig = HermitianEigen::of(&inner.hermitian_part())?;
    Ok(eig.max().max(eig.min().abs()).max(0.0).sqrt())
}

/// `|||defect||| ≤ ‖D−C‖‖F−E‖/4 · |||X|||` for self-adjoint fields in order intervals.
///
/// Links: the refined bound built from the means, and refined ≤ coarse.
pub fn gruss_selfadjoint(
    pair: &TransformerPair,
    x: &Operator,
    bounds: &Bounds,
    g: &GaugeSpec,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    check_x(pair.dim(), x)?;
    let (a, b) = (pair.a(), pair.b());
    a.require_probability("gruss_selfadjoint")?;
    let inside = a.bounds_check(&bounds.c, &bounds.d, HYPOTHESIS_TOL)?
        && b.bounds_check(&bounds.e, &bounds.f, HYPOTHESIS_TOL)?;
    let asserted = opts.hypothesis(inside, || "fields leave their order intervals".into())?;
    let xn = ui_norm(x, g)?;
    let lhs = ui_norm(&pair.defect(x)?, g)?;
    let coarse = (&bounds.d - &bounds.c).op_norm() * (&bounds.f - &bounds.e).op_norm() / 4.0 * xn;
    let refined = refined_factor(&a.gelfand_mean(), &bounds.c, &bounds.d)?
        * refined_factor(&b.gelfand_mean(), &bounds.e, &bounds.f)?
        * xn;
    let mut r = InequalityReport::new("gruss_selfadjoint", lhs, coarse, &opts.tol);
    r.asserted = asserted;
    r.link("refined", lhs, refined, &opts.tol);
    r.push_link(Link {
        name: "refined_le_coarse".into(),
        lhs: refined,
        rhs: coarse,
        pass: refined <= coarse + TOL_ABS,
    });
    r.detail("rhs_refined", refined);
    base_params(&mut r, pair.dim(), a.len());
    r.param("gauge", g.label());
    Ok(r)
}

/// [`gruss_selfadjoint`] for `X ↦ (1/n)Σ A_i X B_i` with uniform weights.
pub fn gruss_elementary(
    a_ops: &[Operator],
    b_ops: &[Operator],
    x: &Operator,
    bounds: &Bounds,
    g: &GaugeSpec,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    let pair = TransformerPair::new(
        OperatorField::uniform(a_ops.to_vec())?,
        OperatorField::uniform(b_ops.to_vec())?,
    )?;
    let mut r = gruss_selfadjoint(&pair, x, bounds, g, opts)?;
    r.name = "gruss_elementary".into();
    Ok(r)
}

/// `||| (∫|A_t − B|²)^θ |||`.
pub fn deviation_gauge(f: &OperatorField, b: &Operator, theta: f64, g: &GaugeSpec) -> Result<f64> {
    moment_gauge(&f.center(b)?, theta, g)
}

/// The mean minimizes `B ↦ ||| (∫|A_t − B|²)^θ |||`: the value at the mean against
/// the smallest value over `samples` random perturbations of it.
///
/// `details.expansion_residual` is the largest deviation from
/// `∫|A_t − B|² = var(A) + |m − B|²` over the samples.
pub fn minimizer_check(
    f: &OperatorField,
    g: &GaugeSpec,
    theta: f64,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    positive("theta", theta)?;
    f.require_probability("minimizer_check")?;
    if samples == 0 {
        return Err(Error::InvalidParams("minimizer_check needs at least one sample".into()));
    }
    let m = f.gelfand_mean();
    let var = f.variance(Side::Left)?;
    let lhs = deviation_gauge(f, &m, theta, g)?;
    let mut rng = Sampler::new(seed);
    let mut best = (f64::INFINITY, 0.0);
    let mut residual = 0.0_f64;
    for k in 0..samples {
        let scale = PERTURBATION_SCALES[k % PERTURBATION_SCALES.len()];
        let e = rng.ginibre(f.dim(), 1.0);
        let en = e.op_norm();
        let step = if en > 0.0 { e.scale_real(scale / en) } else { e };
        let b = &m + &step;
        let value = deviation_gauge(f, &b, theta, g)?;
        if value < best.0 {
            best = (value, scale);
        }
        let direct = f.center(&b)?.second_moment(Side::Left);
        let expanded = &var + &(&step.adjoint() * &step);
        let size = 1.0 + direct.op_norm();
        residual = residual.max(direct.distance(&expanded) / size);
    }
    let mut r = InequalityReport::new("minimizer_check", lhs, best.0, &opts.tol);
    r.detail("argmin_scale", best.1);
    r.detail("expansion_residual", residual);
    base_params(&mut r, f.dim(), f.len());
    r.param("theta", theta);
    r.param("samples", samples);
    r.param("gauge", g.label());
    Ok(r)
}
