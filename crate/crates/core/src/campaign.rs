//! Batch campaigns: seeded instance generation, verification sweeps, tightness
//! search and replay of stored instances.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chebyshev::SolverOptions;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::fields::{OperatorField, StarPattern, DEFAULT_ATOM_BUDGET};
use crate::generators::{stream_seed, GenKind, GenSpec, Sampler, MAX_ATOMS, MAX_DIM, PRNG_ID};
use crate::inequalities::{self as ineq, Bounds, CheckOptions, GrussOptions, InequalityReport, Mode, Tolerances};
use crate::linalg::{HermitianEigen, Operator, C64};
use crate::norms::{resolve_ky_fan, GaugeSpec, ProbeSet};
use crate::transformers::TransformerPair;

pub const CONFIG_FORMAT_VERSION: u32 = 1;
pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const INSTANCE_FORMAT_VERSION: u32 = 1;
/// Environment variable overriding the configured campaign seed.
pub const SEED_ENV: &str = "IPTLAB_SEED";
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SUBSET_BUDGET: usize = 4096;
pub const DEFAULT_MINIMIZER_SAMPLES: usize = 50;
/// Tightness scores ignore instances whose bound is below this.
pub const TIGHTNESS_RHS_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckerTag {
    LandauUi,
    LandauProduct,
    LandauPower,
    LandauSchatten,
    CauchySchwarzUi,
    LandauOv,
    TraceLandau,
    GrussUi,
    GrussSelfadjoint,
    GrussElementary,
    MinimizerCheck,
}

impl CheckerTag {
    pub const ALL: [CheckerTag; 11] = [
        CheckerTag::LandauUi,
        CheckerTag::LandauProduct,
        CheckerTag::LandauPower,
        CheckerTag::LandauSchatten,
        CheckerTag::CauchySchwarzUi,
        CheckerTag::LandauOv,
        CheckerTag::TraceLandau,
        CheckerTag::GrussUi,
        CheckerTag::GrussSelfadjoint,
        CheckerTag::GrussElementary,
        CheckerTag::MinimizerCheck,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckerTag::LandauUi => "landau_ui",
            CheckerTag::LandauProduct => "landau_product",
            CheckerTag::LandauPower => "landau_power",
            CheckerTag::LandauSchatten => "landau_schatten",
            CheckerTag::CauchySchwarzUi => "cauchy_schwarz_ui",
            CheckerTag::LandauOv => "landau_ov",
            CheckerTag::TraceLandau => "trace_landau",
            CheckerTag::GrussUi => "gruss_ui",
            CheckerTag::GrussSelfadjoint => "gruss_selfadjoint",
            CheckerTag::GrussElementary => "gruss_elementary",
            CheckerTag::MinimizerCheck => "minimizer_check",
        }
    }

    fn uses_gauge(&self) -> bool {
        !matches!(self, CheckerTag::LandauSchatten | CheckerTag::TraceLandau)
    }

    fn uses_theta(&self) -> bool {
        matches!(self, CheckerTag::CauchySchwarzUi | CheckerTag::LandauOv | CheckerTag::MinimizerCheck)
    }
}

/// A gauge in a grid: a fixed spec, or a Ky Fan selector resolved against the
/// instance dimension (`{"ky_fan": "half"}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GaugeChoice {
    Spec(GaugeSpec),
    KyFan { ky_fan: String },
}

impl GaugeChoice {
    pub fn resolve(&self, dim: usize) -> Result<GaugeSpec> {
        match self {
            GaugeChoice::Spec(g) => Ok(g.clone()),
            GaugeChoice::KyFan { ky_fan } => GaugeSpec::ky_fan(resolve_ky_fan(ky_fan, dim)?),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GaugeChoice::Spec(g) => g.label(),
            GaugeChoice::KyFan { ky_fan } => format!("ky_fan:{ky_fan}"),
        }
    }

    /// Every gauge of a probe set, Ky Fan entries kept as selectors.
    pub fn probe(set: &ProbeSet) -> Result<Vec<GaugeChoice>> {
        let mut out = Vec::new();
        for p in &set.schatten {
            out.push(GaugeChoice::Spec(GaugeSpec::schatten(p.0)?));
        }
        for sel in &set.ky_fan {
            out.push(GaugeChoice::KyFan { ky_fan: sel.clone() });
        }
        Ok(out)
    }
}

/// Structure of the generated fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    CommutingNormal,
    /// Commuting normal with real spectra.
    CommutingHermitian,
    General,
    Hermitian,
}

/// `equal` sets the second field to the first and `X = I`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    Independent,
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckerConfig {
    pub checker: CheckerTag,
    /// Inclusive range for the dimension `d`.
    #[serde(default = "default_dims")]
    pub dims: [usize; 2],
    /// Inclusive range for the number of atoms `n`.
    #[serde(default = "default_atoms")]
    pub atoms: [usize; 2],
    /// Defaults to the campaign probe set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauges: Option<Vec<GaugeChoice>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    /// `(p, q, r)` triples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<Vec<StarPattern>>,
    #[serde(default)]
    pub coupling: Coupling,
    /// Overrides the structure the checker's hypotheses call for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_kind: Option<FieldKind>,
    #[serde(default)]
    pub random_weights: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Overrides the campaign trial count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

fn default_dims() -> [usize; 2] {
    [1, 6]
}

fn default_atoms() -> [usize; 2] {
    [1, 8]
}

impl CheckerConfig {
    pub fn new(checker: CheckerTag) -> Self {
        CheckerConfig {
            checker,
            dims: default_dims(),
            atoms: default_atoms(),
            gauges: None,
            thetas: None,
            exponents: None,
            patterns: None,
            coupling: Coupling::Independent,
            field_kind: None,
            random_weights: false,
            samples: None,
            trials: None,
        }
    }

    fn field_kind(&self) -> FieldKind {
        if let Some(k) = self.field_kind {
            return k;
        }
        match (self.checker, self.coupling) {
            (CheckerTag::LandauUi | CheckerTag::LandauProduct | CheckerTag::LandauPower, Coupling::Equal) => {
                FieldKind::CommutingHermitian
            }
            (CheckerTag::LandauUi | CheckerTag::LandauProduct | CheckerTag::LandauPower, _) => {
                FieldKind::CommutingNormal
            }
            _ => FieldKind::General,
        }
    }

    /// The grid points, in a fixed order.
    pub fn grid(&self, probe: &ProbeSet) -> Result<Vec<GridPoint>> {
        let gauges: Vec<Option<GaugeChoice>> = if self.checker.uses_gauge() {
            match &self.gauges {
                Some(g) => g.iter().cloned().map(Some).collect(),
                None => GaugeChoice::probe(probe)?.into_iter().map(Some).collect(),
            }
        } else {
            vec![None]
        };
        let thetas: Vec<Option<f64>> = if self.checker.uses_theta() {
            self.thetas.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]).into_iter().map(Some).collect()
        } else {
            vec![None]
        };
        let exponents: Vec<Option<[f64; 3]>> = if self.checker == CheckerTag::LandauSchatten {
            self.exponents.clone().unwrap_or_else(default_exponents).into_iter().map(Some).collect()
        } else {
            vec![None]
        };
        let patterns: Vec<Option<StarPattern>> = if self.checker == CheckerTag::LandauPower {
            match &self.patterns {
                Some(p) => p.iter().cloned().map(Some).collect(),
                None => default_patterns()?.into_iter().map(Some).collect(),
            }
        } else {
            vec![None]
        };
        let mut out = Vec::new();
        for pattern in &patterns {
            for exps in &exponents {
                for theta in &thetas {
                    for gauge in &gauges {
                        out.push(GridPoint {
                            gauge: gauge.clone(),
                            theta: *theta,
                            exponents: *exps,
                            pattern: pattern.clone(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    fn validate(&self, probe: &ProbeSet) -> Result<()> {
        let tag = self.checker.as_str();
        let range = |name: &str, r: [usize; 2], max: usize| -> Result<()> {
            if r[0] == 0 || r[0] > r[1] || r[1] > max {
                return Err(Error::Config(format!("{tag}: {name} range {r:?} must satisfy 1 <= lo <= hi <= {max}")));
            }
            Ok(())
        };
        range("dims", self.dims, MAX_DIM)?;
        range("atoms", self.atoms, MAX_ATOMS)?;
        let nonempty = |name: &str, len: Option<usize>| -> Result<()> {
            if len == Some(0) {
                return Err(Error::Config(format!("{tag}: {name} grid is empty")));
            }
            Ok(())
        };
        nonempty("gauges", self.gauges.as_ref().map(Vec::len))?;
        nonempty("thetas", self.thetas.as_ref().map(Vec::len))?;
        nonempty("exponents", self.exponents.as_ref().map(Vec::len))?;
        nonempty("patterns", self.patterns.as_ref().map(Vec::len))?;
        for t in self.thetas.iter().flatten() {
            if !(t.is_finite() && *t > 0.0) {
                return Err(Error::Config(format!("{tag}: theta {t} must be positive")));
            }
        }
        for [p, q, r] in self.exponents.iter().flatten() {
            let bad = [p, q, r].iter().any(|v| !(v.is_finite() && **v >= 1.0))
                || (1.0 / p - 1.0 / (2.0 * q) - 1.0 / (2.0 * r)).abs() > ineq::EXPONENT_TOL;
            if bad {
                return Err(Error::Config(format!("{tag}: exponents ({p}, {q}, {r}) violate 1/p = 1/(2q) + 1/(2r)")));
            }
        }
        if self.samples == Some(0) {
            return Err(Error::Config(format!("{tag}: samples must be positive")));
        }
        for point in self.grid(probe)? {
            if let Some(g) = &point.gauge {
                g.resolve(self.dims[1]).map_err(|e| Error::Config(format!("{tag}: {e}")))?;
            }
        }
        Ok(())
    }
}

fn default_exponents() -> Vec<[f64; 3]> {
    vec![[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [4.0 / 3.0, 1.0, 2.0], [4.0, 4.0, 4.0]]
}

fn default_patterns() -> Result<Vec<StarPattern>> {
    ["11", "*1", "*1*1", "1**1*1"].iter().map(|s| s.parse()).collect()
}

/// One parameter combination of a checker's grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<StarPattern>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightnessConfig {
    pub restarts: usize,
    pub steps: usize,
    /// Initial perturbation size; grows on success and shrinks on failure.
    pub initial_step: f64,
}

impl Default for TightnessConfig {
    fn default() -> Self {
        TightnessConfig { restarts: 8, steps: 40, initial_step: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "config_version")]
    pub format_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_output")]
    pub output_path: String,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_subset_budget")]
    pub subset_budget: usize,
    #[serde(default = "default_atom_budget")]
    pub atom_budget: usize,
    #[serde(default)]
    pub probe_set: ProbeSet,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub tightness: TightnessConfig,
    pub checkers: Vec<CheckerConfig>,
}

fn config_version() -> u32 {
    CONFIG_FORMAT_VERSION
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_output() -> String {
    "iptlab-report.jsonl".into()
}

fn default_subset_budget() -> usize {
    DEFAULT_SUBSET_BUDGET
}

fn default_atom_budget() -> usize {
    DEFAULT_ATOM_BUDGET
}

impl CampaignConfig {
    /// Every checker with its default grid, `DEFAULT_TRIALS` trials each.
    pub fn default_suite() -> Self {
        let schatten = |p: f64| GaugeChoice::Spec(GaugeSpec::schatten(p).expect("valid exponent"));
        let half = GaugeChoice::KyFan { ky_fan: "half".into() };
        let short = vec![schatten(2.0), schatten(f64::INFINITY), half];
        let checkers = CheckerTag::ALL
            .iter()
            .map(|&tag| {
                let mut c = CheckerConfig::new(tag);
                match tag {
                    CheckerTag::LandauProduct => c.dims = [1, 4],
                    CheckerTag::LandauPower => {
                        c.dims = [1, 3];
                        c.atoms = [1, 4];
                        c.gauges = Some(short.clone());
                    }
                    CheckerTag::GrussUi => {
                        c.dims = [1, 4];
                        c.gauges = Some(short.clone());
                    }
                    CheckerTag::MinimizerCheck => c.gauges = Some(short.clone()),
                    _ => {}
                }
                c
            })
            .collect();
        CampaignConfig {
            format_version: CONFIG_FORMAT_VERSION,
            seed: 0,
            trials: DEFAULT_TRIALS,
            output_path: default_output(),
            tolerances: Tolerances::default(),
            subset_budget: DEFAULT_SUBSET_BUDGET,
            atom_budget: DEFAULT_ATOM_BUDGET,
            probe_set: ProbeSet::default(),
            solver: SolverOptions::default(),
            tightness: TightnessConfig::default(),
            checkers,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CampaignConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != CONFIG_FORMAT_VERSION {
            return Err(Error::Config(format!("unsupported config format_version {}", self.format_version)));
        }
        if self.subset_budget == 0 || self.atom_budget == 0 {
            return Err(Error::Config("subset_budget and atom_budget must be positive".into()));
        }
        if !(self.tolerances.abs >= 0.0 && self.tolerances.rel >= 0.0) {
            return Err(Error::Config("tolerances must be nonnegative".into()));
        }
        for c in &self.checkers {
            c.validate(&self.probe_set)?;
        }
        Ok(())
    }

    /// Applies the seed from `IPTLAB_SEED` when set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer")))?;
        }
        Ok(())
    }

    fn context(&self) -> GenContext {
        GenContext { subset_budget: self.subset_budget, atom_budget: self.atom_budget, solver: self.solver.clone() }
    }
}

/// A fully specified checker input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "checker", rename_all = "snake_case")]
pub enum Instance {
    LandauUi {
        a: OperatorField,
        b: OperatorField,
        x: Operator,
        gauge: GaugeSpec,
    },
    LandauProduct {
        a: OperatorField,
        c: OperatorField,
        b: OperatorField,
        d: OperatorField,
        x: Operator,
        gauge: GaugeSpec,
    },
    LandauPower {
        a: OperatorField,
        b: OperatorField,
        x: Operator,
        pattern: StarPattern,
        gauge: GaugeSpec,
        atom_budget: usize,
    },
    LandauSchatten {
        a: OperatorField,
        b: OperatorField,
        x: Operator,
        p: f64,
        q: f64,
        r: f64,
    },
    CauchySchwarzUi {
        a: OperatorField,
        b: OperatorField,
        theta: f64,
        gauge: GaugeSpec,
    },
    LandauOv {
        a: OperatorField,
        b: OperatorField,
        theta: f64,
        gauge: GaugeSpec,
    },
    TraceLandau {
        a: OperatorField,
        b: OperatorField,
    },
    GrussUi {
        a: OperatorField,
        b: OperatorField,
        x: Operator,
        gauge: GaugeSpec,
        subset_budget: usize,
        seed: u64,
        solver: SolverOptions,
    },
    GrussSelfadjoint {
        a: OperatorField,
        b: OperatorField,
        x: Operator,
        bounds: Bounds,
        gauge: GaugeSpec,
    },
    GrussElementary {
        a_ops: Vec<Operator>,
        b_ops: Vec<Operator>,
        x: Operator,
        bounds: Bounds,
        gauge: GaugeSpec,
    },
    MinimizerCheck {
        f: OperatorField,
        gauge: GaugeSpec,
        theta: f64,
        samples: usize,
        seed: u64,
    },
}

impl Instance {
    pub fn tag(&self) -> CheckerTag {
        match self {
            Instance::LandauUi { .. } => CheckerTag::LandauUi,
            Instance::LandauProduct { .. } => CheckerTag::LandauProduct,
            Instance::LandauPower { .. } => CheckerTag::LandauPower,
            Instance::LandauSchatten { .. } => CheckerTag::LandauSchatten,
            Instance::CauchySchwarzUi { .. } => CheckerTag::CauchySchwarzUi,
            Instance::LandauOv { .. } => CheckerTag::LandauOv,
            Instance::TraceLandau { .. } => CheckerTag::TraceLandau,
            Instance::GrussUi { .. } => CheckerTag::GrussUi,
            Instance::GrussSelfadjoint { .. } => CheckerTag::GrussSelfadjoint,
            Instance::GrussElementary { .. } => CheckerTag::GrussElementary,
            Instance::MinimizerCheck { .. } => CheckerTag::MinimizerCheck,
        }
    }

    pub fn run(&self, opts: &CheckOptions) -> Result<InequalityReport> {
        let pair = |a: &OperatorField, b: &OperatorField| TransformerPair::new(a.clone(), b.clone());
        match self {
            Instance::LandauUi { a, b, x, gauge } => ineq::landau_ui(&pair(a, b)?, x, gauge, opts),
            Instance::LandauProduct { a, c, b, d, x, gauge } => ineq::landau_product(a, c, b, d, x, gauge, opts),
            Instance::LandauPower { a, b, x, pattern, gauge, atom_budget } => {
                ineq::landau_power(a, b, x, pattern, gauge, *atom_budget, opts)
            }
            Instance::LandauSchatten { a, b, x, p, q, r } => ineq::landau_schatten(&pair(a, b)?, x, *p, *q, *r, opts),
            Instance::CauchySchwarzUi { a, b, theta, gauge } => ineq::cauchy_schwarz_ui(a, b, *theta, gauge, opts),
            Instance::LandauOv { a, b, theta, gauge } => ineq::landau_ov(a, b, *theta, gauge, opts),
            Instance::TraceLandau { a, b } => ineq::trace_landau(a, b, opts),
            Instance::GrussUi { a, b, x, gauge, subset_budget, seed, solver } => {
                let gopts = GrussOptions { subset_budget: *subset_budget, seed: *seed, solver: solver.clone() };
                ineq::gruss_ui(&pair(a, b)?, x, gauge, &gopts, opts)
            }
            Instance::GrussSelfadjoint { a, b, x, bounds, gauge } => {
                ineq::gruss_selfadjoint(&pair(a, b)?, x, bounds, gauge, opts)
            }
            Instance::GrussElementary { a_ops, b_ops, x, bounds, gauge } => {
                ineq::gruss_elementary(a_ops, b_ops, x, bounds, gauge, opts)
            }
            Instance::MinimizerCheck { f, gauge, theta, samples, seed } => {
                ineq::minimizer_check(f, gauge, *theta, *samples, *seed, opts)
            }
        }
    }

    /// Replaces the gauge; false for checkers without one.
    pub fn set_gauge(&mut self, g: GaugeSpec) -> bool {
        match self {
            Instance::LandauUi { gauge, .. }
            | Instance::LandauProduct { gauge, .. }
            | Instance::LandauPower { gauge, .. }
            | Instance::CauchySchwarzUi { gauge, .. }
            | Instance::LandauOv { gauge, .. }
            | Instance::GrussUi { gauge, .. }
            | Instance::GrussSelfadjoint { gauge, .. }
            | Instance::GrussElementary { gauge, .. }
            | Instance::MinimizerCheck { gauge, .. } => {
                *gauge = g;
                true
            }
            Instance::LandauSchatten { .. } | Instance::TraceLandau { .. } => false,
        }
    }

    /// A nearby instance satisfying the same hypotheses. Commuting normal fields
    /// move by polynomials in their own atoms, order-bounded fields inside
    /// their interval, others additively.
    pub fn perturb(&self, rng: &mut Sampler, step: f64, coupling: Coupling) -> Result<Instance> {
        let tied = coupling == Coupling::Equal;
        let mut out = self.clone();
        match &mut out {
            Instance::LandauUi { a, b, x, .. } | Instance::LandauPower { a, b, x, .. } => {
                let w = perturb_weights(rng, &a.weights(), step);
                *a = polynomial_move(rng, a, &w, step)?;
                *b = if tied { a.clone() } else { polynomial_move(rng, b, &w, step)? };
                move_x(rng, x, step, tied);
            }
            Instance::LandauProduct { a, c, b, d, x, .. } => {
                let w = perturb_weights(rng, &a.weights(), step);
                let v = perturb_weights(rng, &c.weights(), step);
                let ac = polynomial_move(rng, &joint(a, c)?, &uniform_weights(a.len() + c.len()), step)?;
                (*a, *c) = split(&ac, a.len(), &w, &v)?;
                if tied {
                    (*b, *d) = (a.clone(), c.clone());
                } else {
                    let bd = polynomial_move(rng, &joint(b, d)?, &uniform_weights(b.len() + d.len()), step)?;
                    (*b, *d) = split(&bd, b.len(), &w, &v)?;
                }
                move_x(rng, x, step, tied);
            }
            Instance::LandauSchatten { a, b, x, .. } | Instance::GrussUi { a, b, x, .. } => {
                let w = perturb_weights(rng, &a.weights(), step);
                *a = additive_move(rng, a, &w, step)?;
                *b = if tied { a.clone() } else { additive_move(rng, b, &w, step)? };
                move_x(rng, x, step, tied);
            }
            Instance::CauchySchwarzUi { a, b, .. } | Instance::LandauOv { a, b, .. } | Instance::TraceLandau { a, b } => {
                let w = perturb_weights(rng, &a.weights(), step);
                *a = additive_move(rng, a, &w, step)?;
                *b = if tied { a.clone() } else { additive_move(rng, b, &w, step)? };
            }
            Instance::GrussSelfadjoint { a, b, x, bounds, .. } => {
                let w = perturb_weights(rng, &a.weights(), step);
                *a = interval_move(rng, a, &w, &bounds.c, &bounds.d, step)?;
                *b = if tied { a.clone() } else { interval_move(rng, b, &w, &bounds.e, &bounds.f, step)? };
                move_x(rng, x, step, tied);
            }
            Instance::GrussElementary { a_ops, b_ops, x, bounds, .. } => {
                let w = uniform_weights(a_ops.len());
                let fa = interval_move(rng, &OperatorField::uniform(a_ops.clone())?, &w, &bounds.c, &bounds.d, step)?;
                *a_ops = fa.ops().cloned().collect();
                *b_ops = if tied {
                    a_ops.clone()
                } else {
                    let fb = interval_move(rng, &OperatorField::uniform(b_ops.clone())?, &w, &bounds.e, &bounds.f, step)?;
                    fb.ops().cloned().collect()
                };
                move_x(rng, x, step, tied);
            }
            Instance::MinimizerCheck { f, .. } => {
                let w = perturb_weights(rng, &f.weights(), step);
                *f = additive_move(rng, f, &w, step)?;
            }
        }
        Ok(out)
    }
}

fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn perturb_weights(rng: &mut Sampler, w: &[f64], step: f64) -> Vec<f64> {
    let raw: Vec<f64> = w.iter().map(|&x| x * (step * rng.normal()).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

fn reweight(ops: Vec<Operator>, w: &[f64]) -> Result<OperatorField> {
    OperatorField::probability(w, ops)
}

/// `A_i + step·(z_i I + Σ_j z_ij A_j)/√n`, real coefficients when every atom is Hermitian.
fn polynomial_move(rng: &mut Sampler, f: &OperatorField, w: &[f64], step: f64) -> Result<OperatorField> {
    let real = f.ops().all(|a| a.is_hermitian(1e-12));
    let n = f.len();
    let coef = |rng: &mut Sampler| {
        if real {
            C64::new(rng.normal(), 0.0)
        } else {
            rng.complex_normal()
        }
    };
    let base: Vec<Operator> = f.ops().cloned().collect();
    let scale = step / (n as f64).sqrt();
    let mut ops = Vec::with_capacity(n);
    for a in &base {
        let mut delta = Operator::identity(f.dim()).scale(coef(rng));
        for b in &base {
            delta = delta + b.scale(coef(rng));
        }
        ops.push(a + &delta.scale_real(scale));
    }
    reweight(ops, w)
}

fn additive_move(rng: &mut Sampler, f: &OperatorField, w: &[f64], step: f64) -> Result<OperatorField> {
    let d = f.dim();
    let real = f.ops().all(|a| a.is_hermitian(1e-12));
    let ops = f
        .ops()
        .map(|a| {
            let e = if real { rng.hermitian(d, step) } else { rng.ginibre(d, step) };
            a + &e.scale_real(1.0 / (d as f64).sqrt())
        })
        .collect();
    reweight(ops, w)
}

/// Moves each atom in the coordinates `Y = S⁺(A − C)S⁺`, `S = (D − C)^{1/2}`,
/// clipping the spectrum of `Y` to `[0, 1]` so the field stays in `[C, D]`.
fn interval_move(
    rng: &mut Sampler,
    f: &OperatorField,
    w: &[f64],
    c: &Operator,
    d: &Operator,
    step: f64,
) -> Result<OperatorField> {
    let dim = f.dim();
    let eig = HermitianEigen::of(&d.checked_sub(c)?.hermitian_part())?;
    let floor = 1e-12 * eig.max().abs().max(f64::MIN_POSITIVE);
    let root = eig.reconstruct(|l| if l > floor { l.sqrt() } else { 0.0 });
    let inv_root = eig.reconstruct(|l| if l > floor { 1.0 / l.sqrt() } else { 0.0 });
    let ops = f
        .ops()
        .map(|a| -> Result<Operator> {
            let y = (&(&inv_root * &a.checked_sub(c)?) * &inv_root).hermitian_part();
            let moved = (y + rng.hermitian(dim, step).scale_real(1.0 / (dim as f64).sqrt())).hermitian_part();
            let clipped = HermitianEigen::of(&moved)?.reconstruct(|l| l.clamp(0.0, 1.0));
            Ok((c + &(&(&root * &clipped) * &root)).hermitian_part())
        })
        .collect::<Result<Vec<_>>>()?;
    reweight(ops, w)
}

fn move_x(rng: &mut Sampler, x: &mut Operator, step: f64, tied: bool) {
    if !tied {
        let d = x.dim();
        *x = &*x + &rng.ginibre(d, step).scale_real(1.0 / (d as f64).sqrt());
    }
}

fn joint(a: &OperatorField, c: &OperatorField) -> Result<OperatorField> {
    OperatorField::uniform(a.ops().chain(c.ops()).cloned().collect())
}

fn split(f: &OperatorField, k: usize, w: &[f64], v: &[f64]) -> Result<(OperatorField, OperatorField)> {
    let ops: Vec<Operator> = f.ops().cloned().collect();
    Ok((reweight(ops[..k].to_vec(), w)?, reweight(ops[k..].to_vec(), v)?))
}

/// Budgets and solver settings shared by every generated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct GenContext {
    pub subset_budget: usize,
    pub atom_budget: usize,
    pub solver: SolverOptions,
}

impl Default for GenContext {
    fn default() -> Self {
        CampaignConfig::default_suite().context()
    }
}

fn draw_field(rng: &mut Sampler, kind: FieldKind, u: Option<&Operator>, d: usize, w: &[f64]) -> Result<OperatorField> {
    let (gen, hermitian) = match kind {
        FieldKind::CommutingNormal => (GenKind::CommutingNormal, false),
        FieldKind::CommutingHermitian => (GenKind::CommutingNormal, true),
        FieldKind::General => (GenKind::General, false),
        FieldKind::Hermitian => (GenKind::General, true),
    };
    let spec = GenSpec { hermitian, ..GenSpec::new(0, d, w.len(), gen) };
    let f = match (kind, u) {
        (FieldKind::CommutingNormal | FieldKind::CommutingHermitian, Some(u)) => rng.commuting_normal_in(u, &spec)?,
        _ => rng.field(&spec)?,
    };
    reweight(f.ops().cloned().collect(), w)
}

/// `C` Hermitian and `D = C + G G*/d + I/20`.
fn draw_bounds(rng: &mut Sampler, d: usize) -> (Operator, Operator) {
    let c = rng.hermitian(d, 1.0);
    let g = rng.ginibre(d, 1.0);
    let gap = (&g * &g.adjoint()).scale_real(1.0 / d as f64) + Operator::identity(d).scale_real(0.05);
    let upper = (&c + &gap).hermitian_part();
    (c, upper)
}

/// The instance for one grid point, drawn from the stream `seed`.
pub fn generate(cfg: &CheckerConfig, point: &GridPoint, seed: u64, ctx: &GenContext) -> Result<Instance> {
    let mut rng = Sampler::new(seed);
    let d = rng.int_in(cfg.dims[0], cfg.dims[1]);
    let n = rng.int_in(cfg.atoms[0], cfg.atoms[1]);
    let w = rng.weights(n, cfg.random_weights);
    let kind = cfg.field_kind();
    let tied = cfg.coupling == Coupling::Equal;
    let gauge = match &point.gauge {
        Some(g) => g.resolve(d)?,
        None => GaugeSpec::operator_norm(),
    };
    let theta = point.theta.unwrap_or(1.0);
    let commuting = matches!(kind, FieldKind::CommutingNormal | FieldKind::CommutingHermitian);
    let pair = |rng: &mut Sampler| -> Result<(OperatorField, OperatorField)> {
        let a = draw_field(rng, kind, None, d, &w)?;
        let b = if tied { a.clone() } else { draw_field(rng, kind, None, d, &w)? };
        Ok((a, b))
    };
    let inst = match cfg.checker {
        CheckerTag::LandauUi | CheckerTag::LandauPower => {
            let (a, b) = pair(&mut rng)?;
            let x = if tied { Operator::identity(d) } else { rng.ginibre(d, 1.0) };
            if cfg.checker == CheckerTag::LandauUi {
                Instance::LandauUi { a, b, x, gauge }
            } else {
                let pattern = point
                    .pattern
                    .clone()
                    .ok_or_else(|| Error::Config("landau_power grid point lacks a pattern".into()))?;
                Instance::LandauPower { a, b, x, pattern, gauge, atom_budget: ctx.atom_budget }
            }
        }
        CheckerTag::LandauProduct => {
            let m = rng.int_in(1, 3);
            let v = rng.weights(m, cfg.random_weights);
            let u = commuting.then(|| rng.haar_unitary(d));
            let a = draw_field(&mut rng, kind, u.as_ref(), d, &w)?;
            let c = draw_field(&mut rng, kind, u.as_ref(), d, &v)?;
            let (b, dd) = if tied {
                (a.clone(), c.clone())
            } else {
                let u = commuting.then(|| rng.haar_unitary(d));
                (draw_field(&mut rng, kind, u.as_ref(), d, &w)?, draw_field(&mut rng, kind, u.as_ref(), d, &v)?)
            };
            let x = if tied { Operator::identity(d) } else { rng.ginibre(d, 1.0) };
            Instance::LandauProduct { a, c, b, d: dd, x, gauge }
        }
        CheckerTag::LandauSchatten => {
            let (a, b) = pair(&mut rng)?;
            let x = if tied { Operator::identity(d) } else { rng.ginibre(d, 1.0) };
            let [p, q, r] = point
                .exponents
                .ok_or_else(|| Error::Config("landau_schatten grid point lacks exponents".into()))?;
            Instance::LandauSchatten { a, b, x, p, q, r }
        }
        CheckerTag::CauchySchwarzUi => {
            let (a, b) = pair(&mut rng)?;
            Instance::CauchySchwarzUi { a, b, theta, gauge }
        }
        CheckerTag::LandauOv => {
            let (a, b) = pair(&mut rng)?;
            Instance::LandauOv { a, b, theta, gauge }
        }
        CheckerTag::TraceLandau => {
            let (a, b) = pair(&mut rng)?;
            Instance::TraceLandau { a, b }
        }
        CheckerTag::GrussUi => {
            let (a, b) = pair(&mut rng)?;
            let x = if tied { Operator::identity(d) } else { rng.ginibre(d, 1.0) };
            let subset_seed = rng.next_u64();
            Instance::GrussUi {
                a,
                b,
                x,
                gauge,
                subset_budget: ctx.subset_budget,
                seed: subset_seed,
                solver: ctx.solver.clone(),
            }
        }
        CheckerTag::GrussSelfadjoint | CheckerTag::GrussElementary => {
            let (c, dd) = draw_bounds(&mut rng, d);
            let (e, f) = if tied { (c.clone(), dd.clone()) } else { draw_bounds(&mut rng, d) };
            let w = if cfg.checker == CheckerTag::GrussElementary { uniform_weights(n) } else { w.clone() };
            let spec = |lo: &Operator, hi: &Operator| {
                GenSpec::new(0, d, n, GenKind::SelfadjointBounded { c: lo.clone(), d: hi.clone() })
            };
            let a = reweight(rng.field(&spec(&c, &dd))?.ops().cloned().collect(), &w)?;
            let b = if tied { a.clone() } else { reweight(rng.field(&spec(&e, &f))?.ops().cloned().collect(), &w)? };
            let x = if tied { Operator::identity(d) } else { rng.ginibre(d, 1.0) };
            let bounds = Bounds { c, d: dd, e, f };
            if cfg.checker == CheckerTag::GrussSelfadjoint {
                Instance::GrussSelfadjoint { a, b, x, bounds, gauge }
            } else {
                Instance::GrussElementary {
                    a_ops: a.ops().cloned().collect(),
                    b_ops: b.ops().cloned().collect(),
                    x,
                    bounds,
                    gauge,
                }
            }
        }
        CheckerTag::MinimizerCheck => {
            let f = draw_field(&mut rng, kind, None, d, &w)?;
            let samples = cfg.samples.unwrap_or(DEFAULT_MINIMIZER_SAMPLES);
            Instance::MinimizerCheck { f, gauge, theta, samples, seed: rng.next_u64() }
        }
    };
    Ok(inst)
}

/// The stream seed of trial `trial` at grid point `grid` of checker entry `index`.
pub fn trial_seed(campaign_seed: u64, tag: CheckerTag, index: usize, grid: usize, trial: usize) -> u64 {
    stream_seed(campaign_seed, &format!("{}/{index}/{grid}", tag.as_str()), trial as u64)
}

/// A stored instance with the settings and result it was run with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub prng: String,
    pub mode: Mode,
    pub tolerances: Tolerances,
    pub instance: Instance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<InequalityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InstanceFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let probe: Value = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
        let version = probe.get("format_version").and_then(Value::as_u64);
        if version != Some(INSTANCE_FORMAT_VERSION as u64) {
            return Err(Error::Schema(format!("unsupported instance format_version {version:?}")));
        }
        serde_json::from_value(probe).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Run-wide switches supplied by the caller.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub mode: Mode,
    pub exec: Execution,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckerSummary {
    pub count: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub unasserted: usize,
    /// Smallest slack among asserted reports.
    pub worst_slack: Option<f64>,
    pub best_ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "type")]
    pub kind: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub unasserted: usize,
    pub exit_code: i32,
    pub per_checker: BTreeMap<String, CheckerSummary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Error,
    Unasserted,
}

struct TrialOutcome {
    line: String,
    status: Status,
    slack: Option<f64>,
    ratio: Option<f64>,
    failure: Option<(String, InstanceFile)>,
}

#[derive(Clone, Debug)]
struct Task {
    index: usize,
    grid: usize,
    trial: usize,
    seed: u64,
}

fn tasks(config: &CampaignConfig, grids: &[Vec<GridPoint>]) -> Vec<Task> {
    let mut out = Vec::new();
    for (index, c) in config.checkers.iter().enumerate() {
        let trials = c.trials.unwrap_or(config.trials);
        for grid in 0..grids[index].len() {
            for trial in 0..trials {
                let seed = trial_seed(config.seed, c.checker, index, grid, trial);
                out.push(Task { index, grid, trial, seed });
            }
        }
    }
    out
}

fn provenance(task: &Task, point: &GridPoint) -> BTreeMap<String, Value> {
    let mut p = BTreeMap::new();
    p.insert("checker_index".into(), json!(task.index));
    p.insert("grid".into(), json!(task.grid));
    p.insert("trial".into(), json!(task.trial));
    p.insert("seed".into(), json!(task.seed));
    p.insert("prng".into(), json!(PRNG_ID));
    if let Some(g) = &point.gauge {
        p.insert("gauge_choice".into(), json!(g.label()));
    }
    p
}

fn run_trial(config: &CampaignConfig, grids: &[Vec<GridPoint>], task: &Task, opts: &RunOptions) -> Result<TrialOutcome> {
    let cfg = &config.checkers[task.index];
    let point = &grids[task.index][task.grid];
    let check = CheckOptions { mode: opts.mode, tol: config.tolerances };
    let tag = cfg.checker.as_str();
    let file_name = format!("{tag}-c{}-g{}-t{}.json", task.index, task.grid, task.trial);
    let instance = generate(cfg, point, task.seed, &config.context());
    let result = instance.as_ref().map_err(clone_error).and_then(|inst| inst.run(&check));
    let stored = |report: Option<InequalityReport>, error: Option<String>| {
        instance.as_ref().ok().map(|inst| {
            let file = InstanceFile {
                format_version: INSTANCE_FORMAT_VERSION,
                prng: PRNG_ID.into(),
                mode: opts.mode,
                tolerances: config.tolerances,
                instance: inst.clone(),
                report,
                error,
            };
            (file_name.clone(), file)
        })
    };
    Ok(match result {
        Ok(mut report) => {
            report.params.extend(provenance(task, point));
            let status = match (report.asserted, report.pass) {
                (false, _) => Status::Unasserted,
                (true, true) => Status::Pass,
                (true, false) => Status::Fail,
            };
            let failure = if status == Status::Fail { stored(Some(report.clone()), None) } else { None };
            TrialOutcome {
                line: serde_json::to_string(&report)?,
                status,
                slack: report.asserted.then_some(report.slack),
                ratio: Some(report.ratio),
                failure,
            }
        }
        Err(e) => {
            let record = json!({
                "name": tag,
                "error": e.kind(),
                "message": e.to_string(),
                "pass": false,
                "asserted": true,
                "params": provenance(task, point),
            });
            TrialOutcome {
                line: serde_json::to_string(&record)?,
                status: Status::Error,
                slack: None,
                ratio: None,
                failure: stored(None, Some(e.to_string())),
            }
        }
    })
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::Hypothesis(m) => Error::Hypothesis(m.clone()),
        Error::AtomBudget { required, budget } => Error::AtomBudget { required: *required, budget: *budget },
        Error::Config(m) => Error::Config(m.clone()),
        other => Error::Numerical(other.to_string()),
    }
}

fn header(command: &str, config: &CampaignConfig, mode: Mode) -> Result<String> {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(serde_json::to_string(&json!({
        "type": "header",
        "command": command,
        "format_version": REPORT_FORMAT_VERSION,
        "timestamp": timestamp,
        "prng": PRNG_ID,
        "seed": config.seed,
        "mode": mode,
    }))?)
}

/// `<out>.<suffix>/`, the directory for files written beside the report.
pub fn sidecar_dir(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(format!(".{suffix}"));
    out.with_file_name(name)
}

fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut text = lines.join("\n");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOutcome {
    pub exit_code: i32,
    pub summary: Summary,
    pub report_path: PathBuf,
    /// Instance files written for failing or erroring trials.
    pub failure_files: Vec<PathBuf>,
}

/// Runs every (checker, grid point, trial), writes the JSON Lines report and the
/// failing instances. Exit code 0 iff every asserted check passed and no trial errored.
pub fn run_verify(config: &CampaignConfig, opts: &RunOptions) -> Result<VerifyOutcome> {
    config.validate()?;
    let grids: Vec<Vec<GridPoint>> = config
        .checkers
        .iter()
        .map(|c| c.grid(&config.probe_set))
        .collect::<Result<_>>()?;
    let tasks = tasks(config, &grids);
    let outcomes = map_ordered(opts.exec, &tasks, |t| run_trial(config, &grids, t, opts));

    let mut lines = vec![header("verify", config, opts.mode)?];
    let mut summary = Summary { kind: "summary".into(), ..Default::default() };
    let out = PathBuf::from(&config.output_path);
    let fail_dir = sidecar_dir(&out, "failures");
    let mut failure_files = Vec::new();
    for (task, outcome) in tasks.iter().zip(outcomes) {
        let outcome = outcome?;
        let tag = config.checkers[task.index].checker.as_str();
        let entry = summary.per_checker.entry(tag.to_string()).or_default();
        entry.count += 1;
        summary.total += 1;
        match outcome.status {
            Status::Pass => {
                entry.passed += 1;
                summary.passed += 1;
            }
            Status::Fail => {
                entry.failed += 1;
                summary.failed += 1;
            }
            Status::Error => {
                entry.errors += 1;
                summary.errors += 1;
            }
            Status::Unasserted => {
                entry.unasserted += 1;
                summary.unasserted += 1;
            }
        }
        if let Some(s) = outcome.slack {
            entry.worst_slack = Some(entry.worst_slack.map_or(s, |w| w.min(s)));
        }
        if let Some(r) = outcome.ratio {
            entry.best_ratio = Some(entry.best_ratio.map_or(r, |b| b.max(r)));
        }
        if let Some((name, file)) = outcome.failure {
            let path = fail_dir.join(name);
            file.write(&path)?;
            failure_files.push(path);
        }
        lines.push(outcome.line);
    }
    summary.exit_code = if summary.failed + summary.errors == 0 { 0 } else { 1 };
    lines.push(serde_json::to_string(&summary)?);
    write_lines(&out, &lines)?;
    Ok(VerifyOutcome { exit_code: summary.exit_code, summary, report_path: out, failure_files })
}

/// Best instance found for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessResult {
    #[serde(rename = "type")]
    pub kind: String,
    pub name: String,
    pub checker_index: usize,
    pub grid: usize,
    pub grid_point: GridPoint,
    pub best_ratio: f64,
    pub best_restart: usize,
    /// Restart seed followed by the step seeds of every accepted move.
    pub seed_chain: Vec<u64>,
    pub restarts: usize,
    pub steps: usize,
    pub evaluations: usize,
    pub errors: usize,
    pub instance_file: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TightnessOutcome {
    pub results: Vec<TightnessResult>,
    pub report_path: PathBuf,
}

struct Climb {
    score: f64,
    chain: Vec<u64>,
    instance: Option<Instance>,
    evaluations: usize,
    errors: usize,
}

fn tightness_score(inst: &Instance, check: &CheckOptions) -> Option<f64> {
    let r = inst.run(check).ok()?;
    Some(if r.rhs > TIGHTNESS_RHS_FLOOR { r.lhs / r.rhs } else { 0.0 })
}

fn climb(config: &CampaignConfig, cfg: &CheckerConfig, point: &GridPoint, seed: u64, check: &CheckOptions) -> Climb {
    let t = &config.tightness;
    let mut c = Climb { score: f64::NEG_INFINITY, chain: vec![seed], instance: None, evaluations: 1, errors: 0 };
    let Ok(mut current) = generate(cfg, point, seed, &config.context()) else {
        c.errors += 1;
        return c;
    };
    match tightness_score(&current, check) {
        Some(s) => c.score = s,
        None => c.errors += 1,
    }
    let mut step = t.initial_step;
    for k in 0..t.steps {
        let step_seed = stream_seed(seed, "step", k as u64);
        let mut rng = Sampler::new(step_seed);
        c.evaluations += 1;
        let candidate = current.perturb(&mut rng, step, cfg.coupling);
        match candidate.ok().and_then(|inst| tightness_score(&inst, check).map(|s| (inst, s))) {
            Some((inst, s)) if s > c.score => {
                current = inst;
                c.score = s;
                c.chain.push(step_seed);
                step = (step * 1.5).min(1.0);
            }
            Some(_) => step *= 0.7,
            None => {
                c.errors += 1;
                step *= 0.7;
            }
        }
    }
    c.instance = Some(current);
    c
}

/// Random-restart hill climbing on `lhs/rhs` for every grid point. Never asserts;
/// the best instance of each grid point is stored under `<out>.best/`.
pub fn run_tightness(config: &CampaignConfig, opts: &RunOptions) -> Result<TightnessOutcome> {
    config.validate()?;
    let check = CheckOptions { mode: Mode::Explore, tol: config.tolerances };
    let restarts = config.tightness.restarts;
    let mut jobs = Vec::new();
    for (index, c) in config.checkers.iter().enumerate() {
        for (grid, point) in c.grid(&config.probe_set)?.into_iter().enumerate() {
            for restart in 0..restarts {
                let tag = format!("tightness/{}/{index}/{grid}", c.checker.as_str());
                jobs.push((index, grid, point.clone(), restart, stream_seed(config.seed, &tag, restart as u64)));
            }
        }
    }
    let climbs = map_ordered(opts.exec, &jobs, |(index, _, point, _, seed)| {
        climb(config, &config.checkers[*index], point, *seed, &check)
    });

    let out = PathBuf::from(&config.output_path);
    let best_dir = sidecar_dir(&out, "best");
    let mut results: Vec<TightnessResult> = Vec::new();
    let mut best_instances: Vec<Option<Instance>> = Vec::new();
    for ((index, grid, point, restart, _), c) in jobs.into_iter().zip(climbs) {
        let tag = config.checkers[index].checker.as_str();
        let fresh = results.last().is_none_or(|r| r.checker_index != index || r.grid != grid);
        if fresh {
            results.push(TightnessResult {
                kind: "tightness".into(),
                name: tag.into(),
                checker_index: index,
                grid,
                grid_point: point,
                best_ratio: f64::NEG_INFINITY,
                best_restart: 0,
                seed_chain: Vec::new(),
                restarts,
                steps: config.tightness.steps,
                evaluations: 0,
                errors: 0,
                instance_file: best_dir.join(format!("{tag}-c{index}-g{grid}.json")).display().to_string(),
            });
            best_instances.push(None);
        }
        let r = results.last_mut().expect("pushed above");
        r.evaluations += c.evaluations;
        r.errors += c.errors;
        if c.instance.is_some() && c.score > r.best_ratio {
            r.best_ratio = c.score;
            r.best_restart = restart;
            r.seed_chain = c.chain;
            *best_instances.last_mut().expect("pushed above") = c.instance;
        }
    }

    let mut lines = vec![header("tightness", config, Mode::Explore)?];
    let mut best_per_checker: BTreeMap<String, f64> = BTreeMap::new();
    for (r, inst) in results.iter_mut().zip(best_instances) {
        if let Some(inst) = inst {
            let report = inst.run(&check).ok();
            InstanceFile {
                format_version: INSTANCE_FORMAT_VERSION,
                prng: PRNG_ID.into(),
                mode: Mode::Explore,
                tolerances: config.tolerances,
                instance: inst,
                report,
                error: None,
            }
            .write(Path::new(&r.instance_file))?;
        } else {
            r.instance_file.clear();
        }
        if r.best_ratio.is_finite() {
            let b = best_per_checker.entry(r.name.clone()).or_insert(r.best_ratio);
            *b = b.max(r.best_ratio);
        }
        lines.push(serde_json::to_string(&r)?);
    }
    lines.push(serde_json::to_string(&json!({
        "type": "summary",
        "grid_points": results.len(),
        "best_ratio": best_per_checker,
    }))?);
    write_lines(&out, &lines)?;
    Ok(TightnessOutcome { results, report_path: out })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayOutcome {
    pub report: InequalityReport,
    /// The gauge was overridden.
    pub modified: bool,
    /// Bit-identical `lhs`, `rhs` and verdict to the stored report, when one
    /// was stored and nothing was overridden.
    pub reproduced: Option<bool>,
}

/// Recomputes a stored instance, optionally under another gauge or mode.
pub fn replay(path: &Path, gauge: Option<GaugeSpec>, mode: Option<Mode>) -> Result<ReplayOutcome> {
    let file = InstanceFile::read(path)?;
    let mut instance = file.instance.clone();
    let modified = match gauge {
        Some(g) => {
            if !instance.set_gauge(g) {
                return Err(Error::InvalidParams(format!("{} takes no gauge", instance.tag().as_str())));
            }
            true
        }
        None => false,
    };
    let check = CheckOptions { mode: mode.unwrap_or(file.mode), tol: file.tolerances };
    let mut report = instance.run(&check)?;
    let reproduced = match (&file.report, modified) {
        (Some(old), false) => Some(
            old.lhs.to_bits() == report.lhs.to_bits() && old.rhs.to_bits() == report.rhs.to_bits() && old.pass == report.pass,
        ),
        _ => None,
    };
    if let Some(old) = &file.report {
        for (k, v) in &old.params {
            report.params.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }
    report.param("modified", modified);
    if let Some(r) = reproduced {
        report.param("reproduced", r);
    }
    Ok(ReplayOutcome { report, modified, reproduced })
}
