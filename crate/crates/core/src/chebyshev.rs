//! Chebyshev radius `r∞` and diameter `diam∞` of a finite operator field.
//!
//! `r∞ = min_B max_i ‖A_i − B‖` is a nonsmooth convex minimax problem. The solver
//! runs subgradient steps along top singular pairs until they stall, then
//! refines with a log-barrier interior-point method on the equivalent linear
//! matrix inequality `t·I ⪰ D(A_i − B)`, where `D(M) = [[0, M], [M*, 0]]` is the
//! Hermitian dilation. If the Newton iteration breaks down, a log-sum-exp
//! smoothing minimized by restarted Nesterov steps takes over. Every evaluated
//! point is a feasible centre, so the reported radius is always attained.
//!
//! Lower bounds come from duality. For `Z_i ⪰ 0` with `Σ tr Z_i = 1` and any `y`,
//! `r∞ ≥ Σ tr(Z_i D(A_i − y)) − 2‖Σ (Z_i)₂₁‖₁ · (min_i ‖A_i − y‖ + upper)`;
//! the barrier supplies `Z_i ∝ S_i⁻¹`, the smoothing supplies rank-one `Z_i`.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::OperatorField;
use crate::linalg::{svd_full, Operator, C64, HERMITIAN_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Subgradient iterations without progress before refinement starts.
    pub stall_window: usize,
    #[serde(default)]
    pub refinement: Refinement,
}

/// How the subgradient estimate is refined once it stalls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// Barrier method, falling back to smoothing on numerical breakdown.
    #[default]
    InteriorPoint,
    Smoothing,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-6, max_iter: 5000, stall_window: 50, refinement: Refinement::InteriorPoint }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub center: Operator,
    /// `max_i ‖A_i − center‖`, the value attained at `center`.
    pub radius: f64,
    /// `diam/2`.
    pub lower_bound: f64,
    /// Best feasible value found; equal to `radius`.
    pub upper_bound: f64,
    /// Largest certified lower bound, at least `diam/2`.
    pub certified_lower: f64,
    pub diameter: f64,
    pub iterations: usize,
    /// `upper − certified_lower ≤ tol·(1 + diam)`.
    pub converged: bool,
    /// For Hermitian fields, the value attained at the Hermitian part of the centre.
    pub hermitian_radius: Option<f64>,
}

impl RadiusResult {
    pub fn gap(&self) -> f64 {
        (self.upper_bound - self.certified_lower).max(0.0)
    }
}

/// `max_{s,t} ‖A_s − A_t‖`.
pub fn diameter(f: &OperatorField) -> f64 {
    diameter_pair(f).0
}

fn diameter_pair(f: &OperatorField) -> (f64, usize, usize) {
    let atoms = f.atoms();
    let mut best = (0.0, 0, 0);
    for s in 0..atoms.len() {
        for t in s + 1..atoms.len() {
            let d = atoms[s].op.distance(&atoms[t].op);
            if d > best.0 {
                best = (d, s, t);
            }
        }
    }
    best
}

/// `‖D − C‖/2`, the radius of the order interval `[C, D]`.
pub fn radius_bound_selfadjoint(c: &Operator, d: &Operator) -> Result<f64> {
    Ok(d.checked_sub(c)?.op_norm() / 2.0)
}

struct Pairs {
    /// Per atom: singular values and the rank-one matrices `u v*`.
    values: Vec<Vec<f64>>,
    dyads: Vec<Vec<DMatrix<C64>>>,
}

struct Problem<'a> {
    atoms: &'a [DMatrix<C64>],
    dim: usize,
}

impl Problem<'_> {
    fn pairs(&self, y: &DMatrix<C64>) -> Result<Pairs> {
        let mut values = Vec::with_capacity(self.atoms.len());
        let mut dyads = Vec::with_capacity(self.atoms.len());
        for a in self.atoms {
            let svd = svd_full(&(a - y))?;
            let mut dy = Vec::with_capacity(self.dim);
            for j in 0..svd.values.len() {
                dy.push(svd.u.column(j) * svd.v_adjoint.row(j));
            }
            values.push(svd.values);
            dyads.push(dy);
        }
        Ok(Pairs { values, dyads })
    }

    fn value(&self, y: &DMatrix<C64>) -> Result<f64> {
        let mut worst = 0.0_f64;
        for a in self.atoms {
            let svd = svd_full(&(a - y))?;
            worst = svd.values.iter().copied().fold(worst, f64::max);
        }
        Ok(worst)
    }
}

fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn max_per_atom(p: &Pairs) -> Vec<f64> {
    p.values.iter().map(|v| v.iter().copied().fold(0.0, f64::max)).collect()
}

/// Tracks the best feasible point and the best certified lower bound.
struct Tracker {
    best: DMatrix<C64>,
    upper: f64,
    lower: f64,
    iterations: usize,
    target: f64,
}

impl Tracker {
    fn offer(&mut self, y: &DMatrix<C64>, value: f64) -> bool {
        if value < self.upper {
            self.upper = value;
            self.best = y.clone();
            true
        } else {
            false
        }
    }

    fn done(&self) -> bool {
        self.upper - self.lower <= self.target
    }
}

/// Smallest enclosing operator-norm ball of the atoms.
pub fn chebyshev_radius(f: &OperatorField, opts: &SolverOptions) -> Result<RadiusResult> {
    let mean = f.gelfand_mean();
    let centred: Vec<DMatrix<C64>> = f.ops().map(|a| a.matrix() - mean.matrix()).collect();
    let d = f.dim();
    let problem = Problem { atoms: &centred, dim: d };
    let (diam, s, t) = diameter_pair(f);
    let scale = 1.0 + diam;

    let origin = DMatrix::zeros(d, d);
    let start = problem.value(&origin)?;
    let mut tr = Tracker { best: origin, upper: start, lower: diam / 2.0, iterations: 0, target: opts.tol * scale };
    if diam > 0.0 {
        let mid = (&centred[s] + &centred[t]).map(|z| z * 0.5);
        let v = problem.value(&mid)?;
        tr.offer(&mid, v);
    }

    if !tr.done() {
        let last_step = subgradient_phase(&problem, &mut tr, diam, opts)?;
        let refined = match opts.refinement {
            Refinement::InteriorPoint if !tr.done() => interior_point_phase(&problem, &mut tr, diam, opts).is_ok(),
            _ => false,
        };
        if !tr.done() && !refined {
            smoothing_phase(&problem, &mut tr, last_step, opts)?;
        }
    }

    let mut center_m = &tr.best + mean.matrix();
    let mut hermitian_radius = None;
    if f.ops().all(|a| a.is_hermitian(HERMITIAN_TOL)) {
        let h = Operator::new(center_m.clone())?.hermitian_part();
        let hr = f.ops().map(|a| a.distance(&h)).fold(0.0, f64::max);
        hermitian_radius = Some(hr);
        if hr < tr.upper {
            center_m = h.into_matrix();
        }
    }
    let center = Operator::new(center_m)?;
    // Report the value attained at the returned centre, recomputed in original coordinates.
    let radius = f.ops().map(|a| a.distance(&center)).fold(0.0, f64::max);
    let certified_lower = tr.lower.min(radius);
    Ok(RadiusResult {
        center,
        radius,
        lower_bound: diam / 2.0,
        upper_bound: radius,
        certified_lower,
        diameter: diam,
        iterations: tr.iterations,
        converged: radius - certified_lower <= opts.tol * scale,
        hermitian_radius,
    })
}

/// Steps `B ← B + (diam/√k) u v*` towards the active atom; returns the last step length.
fn subgradient_phase(problem: &Problem, tr: &mut Tracker, diam: f64, opts: &SolverOptions) -> Result<f64> {
    let mut x = tr.best.clone();
    let mut last_progress = 0usize;
    let mut reference = tr.upper;
    let mut step = diam;
    let mut k = 0usize;
    while tr.iterations < opts.max_iter {
        k += 1;
        tr.iterations += 1;
        let pairs = problem.pairs(&x)?;
        let per_atom = max_per_atom(&pairs);
        let value = per_atom.iter().copied().fold(0.0, f64::max);
        tr.offer(&x, value);
        if tr.done() {
            break;
        }
        if reference - tr.upper > tr.target {
            reference = tr.upper;
            last_progress = k;
        } else if k - last_progress >= opts.stall_window {
            break;
        }
        let active = per_atom.iter().position(|&v| v == value).unwrap_or(0);
        let top = pairs.values[active]
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc })
            .0;
        step = diam / (k as f64).sqrt();
        x += pairs.dyads[active][top].map(|z| z * step);
    }
    Ok(step)
}

/// Real coordinates of `B`: for each entry `(r, c)` a real and an imaginary
/// direction, each touching two entries of the dilation.
fn dilation_directions(d: usize) -> Vec<[(usize, usize, C64); 2]> {
    let mut dirs = Vec::with_capacity(2 * d * d);
    for r in 0..d {
        for c in 0..d {
            let one = C64::new(1.0, 0.0);
            let i = C64::new(0.0, 1.0);
            dirs.push([(r, d + c, one), (d + c, r, one)]);
            dirs.push([(r, d + c, i), (d + c, r, -i)]);
        }
    }
    dirs
}

fn dilation(m: &DMatrix<C64>) -> DMatrix<C64> {
    let d = m.nrows();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, d), (d, d)).copy_from(m);
    out.view_mut((d, 0), (d, d)).copy_from(&m.adjoint());
    out
}

/// Cholesky factor of a Hermitian positive definite matrix. The complex
/// factorization takes square roots of negative pivots without complaint, so
/// the pivots are checked here.
fn positive_cholesky(s: DMatrix<C64>) -> Option<Cholesky<C64, nalgebra::Dyn>> {
    let chol = Cholesky::new(s)?;
    let l = chol.l_dirty();
    let ok = (0..l.nrows()).all(|k| {
        let p = l[(k, k)];
        p.re > 0.0 && p.re.is_finite() && p.im.abs() <= 1e-12 * p.re
    });
    ok.then_some(chol)
}

struct Barrier<'a> {
    problem: &'a Problem<'a>,
    dirs: Vec<[(usize, usize, C64); 2]>,
}

impl Barrier<'_> {
    fn center(&self, x: &DVector<f64>) -> DMatrix<C64> {
        let d = self.problem.dim;
        DMatrix::from_fn(d, d, |r, c| C64::new(x[1 + 2 * (r * d + c)], x[2 + 2 * (r * d + c)]))
    }

    /// `S_i = t·I − D(A_i − B)`.
    fn slacks(&self, x: &DVector<f64>) -> Vec<DMatrix<C64>> {
        let b = self.center(x);
        let id = DMatrix::<C64>::identity(2 * self.problem.dim, 2 * self.problem.dim);
        self.problem
            .atoms
            .iter()
            .map(|a| id.map(|z| z * x[0]) - dilation(&(a - &b)))
            .collect()
    }

    /// `τ t − Σ log det S_i`, or `None` outside the feasible region.
    fn value(&self, x: &DVector<f64>, tau: f64) -> Option<f64> {
        let mut v = tau * x[0];
        for s in self.slacks(x) {
            let chol = positive_cholesky(s)?;
            let l = chol.l_dirty();
            v -= 2.0 * (0..l.nrows()).map(|k| l[(k, k)].re.ln()).sum::<f64>();
        }
        Some(v)
    }

    fn inverses(&self, x: &DVector<f64>) -> Result<Vec<DMatrix<C64>>> {
        self.slacks(x)
            .into_iter()
            .map(|s| {
                positive_cholesky(s)
                    .map(|c| c.inverse())
                    .ok_or_else(|| Error::Numerical("barrier iterate left the feasible region".into()))
            })
            .collect()
    }

    fn newton_system(&self, x: &DVector<f64>, tau: f64) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let m = 1 + self.dirs.len();
        let mut g = DVector::zeros(m);
        let mut h = DMatrix::zeros(m, m);
        g[0] = tau;
        for inv in self.inverses(x)? {
            let sq = &inv * &inv;
            g[0] -= inv.trace().re;
            h[(0, 0)] += sq.trace().re;
            for (k, dk) in self.dirs.iter().enumerate() {
                g[k + 1] -= dk.iter().map(|&(p, q, v)| v * inv[(q, p)]).sum::<C64>().re;
                h[(0, k + 1)] += dk.iter().map(|&(p, q, v)| v * sq[(q, p)]).sum::<C64>().re;
                for (l, dl) in self.dirs.iter().enumerate().skip(k) {
                    let mut acc = C64::new(0.0, 0.0);
                    for &(p, q, v) in dk {
                        for &(pp, qq, vv) in dl {
                            acc += v * vv * inv[(q, pp)] * inv[(qq, p)];
                        }
                    }
                    h[(k + 1, l + 1)] += acc.re;
                }
            }
        }
        for k in 0..m {
            for l in 0..k {
                h[(k, l)] = h[(l, k)];
            }
        }
        Ok((g, h))
    }

    /// Dual bound from `Z_i = S_i⁻¹ / Σ tr S_j⁻¹` at the centre of `x`.
    fn certificate(&self, x: &DVector<f64>, upper: f64) -> Result<f64> {
        let d = self.problem.dim;
        let b = self.center(x);
        let inverses = self.inverses(x)?;
        let total: f64 = inverses.iter().map(|z| z.trace().re).sum();
        let mut value = 0.0;
        let mut residual = DMatrix::<C64>::zeros(d, d);
        let mut nearest = f64::INFINITY;
        for (inv, a) in inverses.iter().zip(self.problem.atoms) {
            let diff = a - &b;
            value += (inv * dilation(&diff)).trace().re / total;
            residual += inv.view((d, 0), (d, d)).map(|z| z / total);
            nearest = nearest.min(svd_full(&diff)?.values.iter().copied().fold(0.0, f64::max));
        }
        let trace_norm: f64 = svd_full(&residual)?.values.iter().sum();
        Ok(value - 2.0 * trace_norm * (nearest + upper))
    }
}

/// Barrier method for `min t` subject to `t·I − D(A_i − B) ⪰ 0`, started from the best
/// centre so far. Errors signal a numerical breakdown.
fn interior_point_phase(problem: &Problem, tr: &mut Tracker, diam: f64, opts: &SolverOptions) -> Result<()> {
    let d = problem.dim;
    let barrier = Barrier { problem, dirs: dilation_directions(d) };
    let m = 1 + barrier.dirs.len();
    let mut x = DVector::zeros(m);
    x[0] = tr.upper + 1e-2 * (1.0 + diam);
    for r in 0..d {
        for c in 0..d {
            x[1 + 2 * (r * d + c)] = tr.best[(r, c)].re;
            x[2 + 2 * (r * d + c)] = tr.best[(r, c)].im;
        }
    }
    let constraints = (2 * d * problem.atoms.len()) as f64;
    let mut tau = constraints / (x[0] - tr.lower).max(f64::MIN_POSITIVE);
    let mut stages = 0;
    while tau < 1e16 {
        let centred = centre(&barrier, &mut x, tau, tr, opts);
        if centred.is_err() && stages == 0 {
            return centred;
        }
        stages += 1;
        let b = barrier.center(&x);
        let value = problem.value(&b)?;
        tr.offer(&b, value);
        let certificate = barrier.certificate(&x, tr.upper)?;
        tr.lower = tr.lower.max(certificate);
        if tr.done() || centred.is_err() || tr.iterations >= opts.max_iter {
            return Ok(());
        }
        tau *= 10.0;
    }
    Ok(())
}

/// Damped Newton steps on the barrier at fixed `τ`.
fn centre(barrier: &Barrier, x: &mut DVector<f64>, tau: f64, tr: &mut Tracker, opts: &SolverOptions) -> Result<()> {
    for _ in 0..50 {
        if tr.iterations >= opts.max_iter {
            return Ok(());
        }
        tr.iterations += 1;
        let (g, h) = barrier.newton_system(x, tau)?;
        let step = solve_spd(h, -&g)?;
        let decrement = -g.dot(&step);
        if decrement / 2.0 <= 1e-10 {
            return Ok(());
        }
        let current = barrier.value(x, tau).ok_or_else(|| Error::Numerical("infeasible barrier iterate".into()))?;
        let mut s = 1.0;
        loop {
            let trial = &*x + &step * s;
            if let Some(v) = barrier.value(&trial, tau) {
                if v <= current - 0.25 * s * decrement {
                    *x = trial;
                    break;
                }
            }
            s *= 0.5;
            if s < 1e-12 {
                return Err(Error::Numerical("barrier line search failed".into()));
            }
        }
    }
    Ok(())
}

/// Solves `H x = rhs` for symmetric positive definite `H` after Jacobi scaling,
/// adding diagonal regularization when rounding breaks positivity.
fn solve_spd(h: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    let n = h.nrows();
    let scale: Vec<f64> = (0..n).map(|k| 1.0 / h[(k, k)].max(f64::MIN_POSITIVE).sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |r, c| h[(r, c)] * scale[r] * scale[c]);
    let b = DVector::from_fn(n, |r, _| rhs[r] * scale[r]);
    let mut shift = 0.0;
    for _ in 0..6 {
        let mut m = scaled.clone();
        for k in 0..n {
            m[(k, k)] += shift;
        }
        if let Some(chol) = Cholesky::new(m) {
            let y = chol.solve(&b);
            return Ok(DVector::from_fn(n, |r, _| y[r] * scale[r]));
        }
        shift = if shift == 0.0 { 1e-14 } else { shift * 100.0 };
    }
    Err(Error::Numerical("barrier Hessian is not positive definite".into()))
}

/// Restarted Nesterov descent on `F_μ(B) = μ log Σ_ij 2cosh(s_ij(A_i − B)/μ)`,
/// halving `μ` per stage.
fn smoothing_phase(problem: &Problem, tr: &mut Tracker, step: f64, opts: &SolverOptions) -> Result<()> {
    let count = problem.atoms.len() * problem.dim;
    let log_terms = ((2 * count) as f64).ln();
    let mut mu = (step / log_terms).max(f64::MIN_POSITIVE);
    let mu_final = 0.1 * tr.target / log_terms;
    let mut x = tr.best.clone();
    loop {
        let lipschitz = 2.0 / mu;
        let mut x_prev = x.clone();
        let mut momentum = 1.0_f64;
        let mut last_smooth = f64::INFINITY;
        for _ in 0..100 {
            if tr.iterations >= opts.max_iter || tr.done() {
                return Ok(());
            }
            tr.iterations += 1;
            let next_momentum = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
            let beta = (momentum - 1.0) / next_momentum;
            let y = &x + (&x - &x_prev).map(|z| z * beta);
            let eval = smoothed(problem, &y, mu)?;
            tr.offer(&y, eval.value);
            let reach = eval.nearest + tr.upper;
            let certificate = eval.weighted - (problem.dim as f64).sqrt() * frobenius(&eval.residual) * reach;
            tr.lower = tr.lower.max(certificate);
            if eval.smooth > last_smooth {
                // Function restart: drop momentum and continue from the current iterate.
                momentum = 1.0;
                x_prev = x.clone();
                last_smooth = f64::INFINITY;
                continue;
            }
            last_smooth = eval.smooth;
            // ∇F_μ = −residual.
            let x_new = &y + eval.residual.map(|z| z / lipschitz);
            x_prev = std::mem::replace(&mut x, x_new);
            momentum = next_momentum;
            if frobenius(&eval.residual) / lipschitz < 1e-3 * mu {
                break;
            }
        }
        if mu <= mu_final || tr.iterations >= opts.max_iter {
            return Ok(());
        }
        mu = (mu / 2.0).max(mu_final);
        x = tr.best.clone();
    }
}

struct Smoothed {
    /// `max_ij s_ij`, the true objective at `y`.
    value: f64,
    smooth: f64,
    /// `Σ c_ij s_ij`.
    weighted: f64,
    /// `Σ c_ij u_ij v_ij*`.
    residual: DMatrix<C64>,
    /// `min_i ‖A_i − y‖`.
    nearest: f64,
}

fn smoothed(problem: &Problem, y: &DMatrix<C64>, mu: f64) -> Result<Smoothed> {
    let pairs = problem.pairs(y)?;
    let per_atom = max_per_atom(&pairs);
    let smax = per_atom.iter().copied().fold(0.0, f64::max);
    let nearest = per_atom.iter().copied().fold(f64::INFINITY, f64::min);
    let mut z = 0.0;
    for vals in &pairs.values {
        for &s in vals {
            z += ((s - smax) / mu).exp() + ((-s - smax) / mu).exp();
        }
    }
    let d = problem.dim;
    let mut residual = DMatrix::zeros(d, d);
    let mut weighted = 0.0;
    for (vals, dyads) in pairs.values.iter().zip(&pairs.dyads) {
        for (&s, dy) in vals.iter().zip(dyads) {
            let c = (((s - smax) / mu).exp() - ((-s - smax) / mu).exp()) / z;
            if c > 0.0 {
                weighted += c * s;
                residual += dy.map(|e| e * c);
            }
        }
    }
    Ok(Smoothed { value: smax, smooth: smax + mu * z.ln(), weighted, residual, nearest })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalars(values: &[C64]) -> OperatorField {
        OperatorField::uniform(values.iter().map(|&v| Operator::scalar(v)).collect()).unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&OperatorField::constant(Operator::identity(2))), 0.0);
        assert_eq!(diameter(&scalars(&[re(0.0), re(1.0)])), 1.0);
        let d = diameter(&scalars(&[re(0.0), re(1.0), C64::new(0.0, 1.0)]));
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn radius_examples() {
        let opts = SolverOptions::default();
        let r = chebyshev_radius(&scalars(&[re(0.0), re(1.0)]), &opts).unwrap();
        assert!((r.radius - 0.5).abs() < 1e-12);
        assert!((r.center.get(0, 0) - re(0.5)).norm() < 1e-12);
        assert!(r.converged);

        let r = chebyshev_radius(&OperatorField::constant(Operator::identity(3)), &opts).unwrap();
        assert_eq!(r.radius, 0.0);
        assert!(r.converged);

        let r = chebyshev_radius(&scalars(&[re(0.0), re(1.0), C64::new(0.0, 1.0)]), &opts).unwrap();
        assert!((r.radius - 0.5f64.sqrt()).abs() < 1e-4, "{}", r.radius);
        assert!((r.center.get(0, 0) - C64::new(0.5, 0.5)).norm() < 1e-3);
        assert!(r.hermitian_radius.is_none());
    }

    #[test]
    fn unequal_weights_do_not_move_the_ball() {
        let f = OperatorField::probability(&[0.1, 0.2, 0.7], vec![
            Operator::real_scalar(0.0),
            Operator::real_scalar(1.0),
            Operator::real_scalar(1.0),
        ])
        .unwrap();
        let r = chebyshev_radius(&f, &SolverOptions::default()).unwrap();
        assert!((r.radius - 0.5).abs() < 1e-9);
        assert_eq!(r.hermitian_radius.map(|h| h >= r.radius), Some(true));
    }

    #[test]
    fn selfadjoint_bound_examples() {
        let i2 = Operator::identity(2);
        assert_eq!(radius_bound_selfadjoint(&Operator::zeros(2), &i2).unwrap(), 0.5);
        assert_eq!(radius_bound_selfadjoint(&i2, &i2).unwrap(), 0.0);
        let c = -&i2;
        let d = Operator::from_real_diagonal(&[1.0, 3.0]);
        assert!((radius_bound_selfadjoint(&c, &d).unwrap() - 2.0).abs() < 1e-15);
    }
    fn sdp_field() -> OperatorField {
        let i = C64::new(0.0, 1.0);
        let op = |e: [[C64; 2]; 2]| Operator::from_rows(&[e[0].to_vec(), e[1].to_vec()]).unwrap();
        OperatorField::uniform(vec![
            op([[re(1.0), re(2.0) * i], [re(0.0), re(-1.0)]]),
            op([[re(0.0), re(1.0)], [re(1.0), i]]),
            op([[re(-1.0), re(0.0)], [re(0.5), re(2.0)]]),
        ])
        .unwrap()
    }

    #[test]
    fn matches_semidefinite_program_oracle() {
        let r = chebyshev_radius(&sdp_field(), &SolverOptions::default()).unwrap();
        assert!((r.radius - 1.91962154).abs() < 1e-6, "{}", r.radius);
        assert!(r.converged && r.certified_lower <= r.radius + 1e-12);
        assert!(r.gap() <= 1e-6);
    }

    #[test]
    fn smoothing_sandwiches_the_radius() {
        let opts = SolverOptions { refinement: Refinement::Smoothing, ..SolverOptions::default() };
        let r = chebyshev_radius(&sdp_field(), &opts).unwrap();
        assert!(r.lower_bound <= 1.91962154 + 1e-8 && 1.91962154 <= r.upper_bound + 1e-8, "{r:?}");
        assert!((r.radius - 1.91962154).abs() < 1e-3);
    }
}
