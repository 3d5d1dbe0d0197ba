//! Parameterized experiments that measure inequality constants on seeded
//! function families and check them against asserted bounds or
//! refinement-stability criteria.
//!
//! Each experiment is deterministic given its seed: function descriptors are
//! drawn once and realized on every grid of the resolution sweep, all
//! reductions are sequential, and reports carry the full parameter echo so a
//! run can be reproduced from its JSONL line alone.
//!
//! "Stable under refinement" always means: the measured constant at
//! consecutive resolutions differs by at most 10% relative (of the larger).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::discretize::{BoxDomain, CubeFamily, CubePolicy, UniformGrid};
use crate::exponent::ExponentField;
use crate::{Error, Result};

pub mod doubling;
pub mod families;
mod kinds;

pub use doubling::{find_doubling_parameters, DoublingParams};

/// Relative tolerance defining refinement stability.
pub const STABILITY_TOL: f64 = 0.10;

/// The experiment kinds, with their kind-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentKind {
    /// `int |fg| <= 2 ||f||_p ||g||_{p'}`: assert the constant 2.
    HolderIntegral { cases: usize },
    /// `||f1 f2||_p <= 4 ||f1||_{p1} ||f2||_{p2}`: assert the constant 4.
    HolderProduct { cases: usize },
    /// Orlicz Hölder on cubes: measure the constant, assert stability.
    HolderOrlicz { cases: usize },
    /// Characteristic-norm equivalences: two-sided window of
    /// `||chi_Q||_p / |Q|^{1/p_Q}` plus the small-cube branch.
    CharNormEquiv,
    /// `sup_Q ||chi_Q||_q ||chi_Q||_{p'} / |Q|^{1 - gamma/n}` with the unit
    /// weight: measure, assert stability.
    WeightIdentity { gamma: f64 },
    /// Kolmogorov inequality with the classical constant
    /// `(q/(q-p))^{1/p}`: assert zero violations.
    Kolmogorov { cases: usize },
    /// Pointwise chain of multilinear maximal functions: links 1-2 with
    /// constant 1, third link measured against `M_r`.
    MaximalChain { cases: usize, r: f64 },
    /// Cubewise `exp L` bound for symbol oscillations against the variable
    /// Lipschitz norm, plus the telescoping average gap.
    ExpLAvgBound { beta: f64 },
    /// Sharp-function domination of slot commutators by
    /// `||b|| (M_eta(Tf) + M_{L log L}(f))`: measure, assert stability
    /// across grid refinement and the kernel mollification sweep.
    PointwiseSharp {
        families: usize,
        gamma: f64,
        eta: f64,
        beta: f64,
        rho_cells_sweep: Vec<f64>,
    },
    /// `||f||_q <= C ||f_sharp||_p`: measure, assert stability.
    SharpNormBound { gamma: f64, beta: f64 },
    /// Pointwise domination `|T_{b_1} f| <= 1.05 ||b_1||_Lambda I_delta(|f|)`:
    /// assert zero violations.
    Thm31Domination { cases: usize, delta: f64 },
    /// Norm ratio of the commutator against `||b|| prod ||f_i||` in the
    /// constant-delta setting: measure, assert stability.
    Thm31Ratio { cases: usize, delta: f64 },
    /// Same ratio in the variable-delta setting.
    Thm32Ratio { cases: usize, beta: f64 },
    /// `||I_alpha f|| _q / prod ||f_i||_{p_i}`: measure, assert stability.
    FracBound { cases: usize, alpha: f64 },
    /// `||Mf||_p / ||f||_p` for `p` and `p'` across refinement (diagnostic).
    MaximalBoundTrend,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::HolderIntegral { .. } => "holder_integral",
            ExperimentKind::HolderProduct { .. } => "holder_product",
            ExperimentKind::HolderOrlicz { .. } => "holder_orlicz",
            ExperimentKind::CharNormEquiv => "char_norm_equiv",
            ExperimentKind::WeightIdentity { .. } => "weight_identity",
            ExperimentKind::Kolmogorov { .. } => "kolmogorov",
            ExperimentKind::MaximalChain { .. } => "maximal_chain",
            ExperimentKind::ExpLAvgBound { .. } => "expL_avg_bound",
            ExperimentKind::PointwiseSharp { .. } => "pointwise_sharp",
            ExperimentKind::SharpNormBound { .. } => "sharp_norm_bound",
            ExperimentKind::Thm31Domination { .. } => "thm31_domination",
            ExperimentKind::Thm31Ratio { .. } => "thm31_ratio",
            ExperimentKind::Thm32Ratio { .. } => "thm32_ratio",
            ExperimentKind::FracBound { .. } => "frac_bound",
            ExperimentKind::MaximalBoundTrend => "maximal_bound_trend",
        }
    }
}

/// All experiment kind names, for the CLI listing.
pub fn all_kind_names() -> &'static [&'static str] {
    &[
        "holder_integral",
        "holder_product",
        "holder_orlicz",
        "char_norm_equiv",
        "weight_identity",
        "kolmogorov",
        "maximal_chain",
        "expL_avg_bound",
        "pointwise_sharp",
        "sharp_norm_bound",
        "thm31_domination",
        "thm31_ratio",
        "thm32_ratio",
        "frac_bound",
        "maximal_bound_trend",
    ]
}

/// A fully resolved experiment: kind parameters plus grid, exponents,
/// kernel mollification, cube family, and seed.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub dim: usize,
    pub half_extent: f64,
    /// Ascending resolution sweep; stability criteria compare consecutive
    /// entries and the last entry is the reported one.
    pub resolutions: Vec<usize>,
    /// Primary exponent field, for kinds that use one.
    pub exponent: Option<ExponentField>,
    /// Additional exponent fields in kind-specific roles (slot exponents
    /// `p_1, p_2`, the `r(.)` of variable-delta kinds, extra Hölder fields).
    pub aux_exponents: Vec<ExponentField>,
    /// Mollification parameter of the representative kernel, in units of the
    /// grid spacing.
    pub rho_cells: f64,
    pub cube_policy: CubePolicy,
    /// Side cap for the cube family; 0 means the full grid.
    pub max_side_cells: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, dim: usize, half_extent: f64, resolutions: Vec<usize>) -> Self {
        ExperimentSpec {
            kind,
            dim,
            half_extent,
            resolutions,
            exponent: None,
            aux_exponents: Vec::new(),
            rho_cells: 2.0,
            cube_policy: CubePolicy::AllGridCubes,
            max_side_cells: 0,
            seed: 0,
        }
    }

    pub fn with_exponent(mut self, p: ExponentField) -> Self {
        self.exponent = Some(p);
        self
    }

    pub fn with_aux(mut self, aux: Vec<ExponentField>) -> Self {
        self.aux_exponents = aux;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn grid(&self, resolution: usize) -> Result<UniformGrid> {
        let domain = BoxDomain::new(self.dim, self.half_extent)?;
        UniformGrid::new(domain, resolution)
    }

    pub(crate) fn family(&self, resolution: usize) -> CubeFamily {
        let cap = if self.max_side_cells == 0 {
            resolution
        } else {
            self.max_side_cells.min(resolution)
        };
        CubeFamily {
            policy: self.cube_policy,
            max_side_cells: cap,
        }
    }

    pub(crate) fn primary(&self) -> Result<&ExponentField> {
        self.exponent
            .as_ref()
            .ok_or_else(|| Error::param(format!("{} needs an exponent field", self.kind.name())))
    }

    pub(crate) fn aux(&self, i: usize) -> Result<&ExponentField> {
        self.aux_exponents.get(i).ok_or_else(|| {
            Error::param(format!(
                "{} needs at least {} auxiliary exponent fields",
                self.kind.name(),
                i + 1
            ))
        })
    }

    fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() {
            return Err(Error::param("at least one resolution is required"));
        }
        if self.resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("resolutions must be strictly ascending"));
        }
        if !(self.rho_cells > 0.0) {
            return Err(Error::param("rho_cells must be positive"));
        }
        for f in self.exponent.iter().chain(self.aux_exponents.iter()) {
            if f.dim() != self.dim {
                return Err(Error::DimensionMismatch(
                    "exponent dimension differs from experiment domain".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One entry of the resolution sweep in a report.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResolutionSample {
    #[cfg_attr(feature = "serde", serde(rename = "N"))]
    pub n: usize,
    pub value: f64,
}

/// Echo of the kernel used by an experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelEcho {
    pub kind: String,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub rho: Option<f64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub alpha: Option<f64>,
    pub m: usize,
    pub n: usize,
}

/// Result of one experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub kind: String,
    /// Echo of the numeric parameters of the run.
    pub params: BTreeMap<String, f64>,
    /// Headline measured constant (at the finest resolution).
    pub measured_constant: f64,
    /// Fixed bound the measurement is asserted against, when one exists;
    /// stability-only criteria leave this empty.
    pub asserted_bound: Option<f64>,
    pub pass: bool,
    /// Description of the extremal case/cube/point, when meaningful.
    pub argmax: Option<String>,
    pub resolutions: Vec<ResolutionSample>,
    /// Filled by the runner harness; excluded from determinism comparisons.
    pub runtime_ms: f64,
    pub seed: u64,
    pub kernel: Option<KernelEcho>,
    /// Error message when the experiment could not run; implies `pass = false`.
    pub error: Option<String>,
    /// Secondary measured values.
    pub details: BTreeMap<String, f64>,
}

/// Outcome assembled by a kind runner.
pub(crate) struct KindOutcome {
    pub measured: f64,
    pub bound: Option<f64>,
    pub pass: bool,
    pub argmax: Option<String>,
    pub resolutions: Vec<ResolutionSample>,
    pub kernel: Option<KernelEcho>,
    pub details: BTreeMap<String, f64>,
}

/// Relative-stability predicate shared by all trend criteria.
pub fn stable(a: f64, b: f64) -> bool {
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= STABILITY_TOL * a.abs().max(b.abs())
}

/// All consecutive pairs of a ladder are stable and every value is finite.
pub(crate) fn ladder_stable(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite()) && values.windows(2).all(|w| stable(w[0], w[1]))
}

/// Run one experiment; failures surface in the report, never as panics.
pub fn run_experiment(spec: &ExperimentSpec) -> ExperimentReport {
    let mut report = ExperimentReport {
        kind: spec.kind.name().to_string(),
        params: kinds::param_echo(spec),
        measured_constant: f64::NAN,
        asserted_bound: None,
        pass: false,
        argmax: None,
        resolutions: Vec::new(),
        runtime_ms: 0.0,
        seed: spec.seed,
        kernel: None,
        error: None,
        details: BTreeMap::new(),
    };
    let outcome = spec.validate().and_then(|_| kinds::run(spec));
    match outcome {
        Ok(o) => {
            report.measured_constant = o.measured;
            report.asserted_bound = o.bound;
            report.pass = o.pass;
            report.argmax = o.argmax;
            report.resolutions = o.resolutions;
            report.kernel = o.kernel;
            report.details = o.details;
        }
        Err(e) => {
            report.error = Some(e.to_string());
            report.pass = false;
        }
    }
    report
}

/// Run a list of experiments sequentially. Results are independent of
/// execution order, so callers may parallelize across specs and reassemble
/// in input order.
pub fn run_suite(specs: &[ExperimentSpec]) -> Vec<ExperimentReport> {
    specs.iter().map(run_experiment).collect()
}

/// Aggregate pass flag of a suite (an empty suite passes).
pub fn aggregate_pass(reports: &[ExperimentReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
