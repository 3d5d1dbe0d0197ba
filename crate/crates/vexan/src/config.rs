//! JSON run configuration: domain, named exponent descriptors, kernel, and
//! the experiment suite.
//!
//! Unknown keys are rejected everywhere so typos in experiment names or
//! parameters fail fast instead of silently running defaults.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use vexan_core::discretize::CubePolicy;
use vexan_core::exponent::ExponentField;
use vexan_core::harness::{ExperimentKind, ExperimentSpec};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    /// Named exponent descriptors referenced by suite entries.
    pub exponents: BTreeMap<String, ExponentDesc>,
    /// Mollification parameter (in cells) of the representative kernel.
    #[serde(default = "default_rho_cells")]
    pub rho_cells: f64,
    pub suite: Vec<SuiteEntry>,
    #[serde(default)]
    pub seed: u64,
    /// Output path prefix for the JSONL and CSV reports.
    pub output: String,
    #[serde(default)]
    pub parallelism: Option<usize>,
}

fn default_rho_cells() -> f64 {
    2.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub dim: usize,
    pub half_extent: f64,
    /// Ascending resolution sweep shared by all experiments.
    pub resolutions: Vec<usize>,
}

/// Closed-form exponent descriptor: `{"kind": ..., "params": [...], "dim": n}`.
///
/// Parameter layout by kind:
/// - `constant`: `[value]`
/// - `log_perturbed`: `[base, coeff]` for `base + coeff/ln(e + |x|)`
/// - `bump`: `[base, height, center_1, (center_2,) radius]`
/// - `radial_step`: `[inner, outer, radius, width]`
/// - `affine`: `[base, slope_1, (slope_2)]`
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentDesc {
    pub kind: String,
    pub params: Vec<f64>,
    pub dim: usize,
}

impl ExponentDesc {
    pub fn build(&self) -> Result<ExponentField> {
        let p = &self.params;
        let dim = self.dim;
        if dim != 1 && dim != 2 {
            bail!("exponent dim must be 1 or 2");
        }
        let field = match self.kind.as_str() {
            "constant" => {
                arity(p, 1, "constant")?;
                ExponentField::Constant { value: p[0], dim }
            }
            "log_perturbed" => {
                arity(p, 2, "log_perturbed")?;
                ExponentField::LogPerturbed {
                    base: p[0],
                    coeff: p[1],
                    dim,
                }
            }
            "bump" => {
                arity(p, 3 + dim, "bump")?;
                let mut center = [0.0; 2];
                center[..dim].copy_from_slice(&p[2..2 + dim]);
                ExponentField::Bump {
                    base: p[0],
                    height: p[1],
                    center,
                    radius: p[2 + dim],
                    dim,
                }
            }
            "radial_step" => {
                arity(p, 4, "radial_step")?;
                ExponentField::RadialStep {
                    inner: p[0],
                    outer: p[1],
                    radius: p[2],
                    width: p[3],
                    dim,
                }
            }
            "affine" => {
                arity(p, 1 + dim, "affine")?;
                let mut slope = [0.0; 2];
                slope[..dim].copy_from_slice(&p[1..1 + dim]);
                ExponentField::Affine { base: p[0], slope, dim }
            }
            other => bail!("unknown exponent kind {other:?}"),
        };
        Ok(field)
    }
}

fn arity(params: &[f64], want: usize, kind: &str) -> Result<()> {
    if params.len() != want {
        bail!("exponent kind {kind:?} takes {want} params, got {}", params.len());
    }
    Ok(())
}

/// One experiment of the suite. The `kind` tag selects the experiment; the
/// remaining fields name exponents from the config and override kind
/// parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SuiteEntry {
    #[serde(rename = "holder_integral")]
    HolderIntegral {
        exponent: String,
        #[serde(default)]
        extra_exponents: Vec<String>,
        #[serde(default = "default_cases_100")]
        cases: usize,
    },
    #[serde(rename = "holder_product")]
    HolderProduct {
        exponents: [String; 2],
        #[serde(default = "default_cases_20")]
        cases: usize,
    },
    #[serde(rename = "holder_orlicz")]
    HolderOrlicz {
        #[serde(default = "default_cases_20")]
        cases: usize,
    },
    #[serde(rename = "char_norm_equiv")]
    CharNormEquiv { exponent: String },
    #[serde(rename = "weight_identity")]
    WeightIdentity {
        exponent: String,
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
    #[serde(rename = "kolmogorov")]
    Kolmogorov {
        #[serde(default = "default_cases_50")]
        cases: usize,
    },
    #[serde(rename = "maximal_chain")]
    MaximalChain {
        #[serde(default = "default_cases_20")]
        cases: usize,
        #[serde(default = "default_r")]
        r: f64,
    },
    #[serde(rename = "expL_avg_bound")]
    ExpLAvgBound {
        exponent: String,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    #[serde(rename = "pointwise_sharp")]
    PointwiseSharp {
        exponent: String,
        #[serde(default = "default_families")]
        families: usize,
        #[serde(default = "default_gamma_sharp")]
        gamma: f64,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default = "default_rho_sweep")]
        rho_cells_sweep: Vec<f64>,
    },
    #[serde(rename = "sharp_norm_bound")]
    SharpNormBound {
        exponent: String,
        r_exponent: String,
        #[serde(default = "default_gamma_sharp")]
        gamma: f64,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    #[serde(rename = "thm31_domination")]
    Thm31Domination {
        #[serde(default = "default_cases_10")]
        cases: usize,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    #[serde(rename = "thm31_ratio")]
    Thm31Ratio {
        exponents: [String; 2],
        #[serde(default = "default_cases_10")]
        cases: usize,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    #[serde(rename = "thm32_ratio")]
    Thm32Ratio {
        exponents: [String; 2],
        r_exponent: String,
        #[serde(default = "default_cases_10")]
        cases: usize,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    #[serde(rename = "frac_bound")]
    FracBound {
        exponents: [String; 2],
        #[serde(default = "default_cases_10")]
        cases: usize,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    #[serde(rename = "maximal_bound_trend")]
    MaximalBoundTrend { exponent: String },
}

fn default_cases_100() -> usize {
    100
}
fn default_cases_50() -> usize {
    50
}
fn default_cases_20() -> usize {
    20
}
fn default_cases_10() -> usize {
    10
}
fn default_gamma() -> f64 {
    0.3
}
fn default_gamma_sharp() -> f64 {
    0.2
}
fn default_eta() -> f64 {
    0.4
}
fn default_beta() -> f64 {
    1.25
}
fn default_delta() -> f64 {
    0.5
}
fn default_alpha() -> f64 {
    0.5
}
fn default_r() -> f64 {
    2.0
}
fn default_families() -> usize {
    5
}
fn default_rho_sweep() -> Vec<f64> {
    vec![4.0, 2.0]
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).context("parsing run config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.domain.resolutions.is_empty() {
            bail!("domain.resolutions must not be empty");
        }
        if self.domain.resolutions.windows(2).any(|w| w[1] <= w[0]) {
            bail!("domain.resolutions must be strictly ascending");
        }
        if self.suite.is_empty() {
            bail!("suite must contain at least one experiment");
        }
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<ExponentField> {
        let desc = self
            .exponents
            .get(name)
            .ok_or_else(|| anyhow!("unknown exponent name {name:?}"))?;
        let field = desc.build()?;
        if field.dim() != self.domain.dim {
            bail!("exponent {name:?} has dim {} but domain has dim {}", field.dim(), self.domain.dim);
        }
        Ok(field)
    }

    /// Resolve the suite into fully specified experiments.
    pub fn build_specs(&self) -> Result<Vec<ExperimentSpec>> {
        self.suite.iter().map(|entry| self.build_spec(entry)).collect()
    }

    fn build_spec(&self, entry: &SuiteEntry) -> Result<ExperimentSpec> {
        let mk = |kind: ExperimentKind| {
            let mut spec = ExperimentSpec::new(
                kind,
                self.domain.dim,
                self.domain.half_extent,
                self.domain.resolutions.clone(),
            );
            spec.seed = self.seed;
            spec.rho_cells = self.rho_cells;
            spec.cube_policy = CubePolicy::AllGridCubes;
            spec
        };
        let spec = match entry {
            SuiteEntry::HolderIntegral {
                exponent,
                extra_exponents,
                cases,
            } => {
                let mut spec = mk(ExperimentKind::HolderIntegral { cases: *cases });
                spec.exponent = Some(self.lookup(exponent)?);
                spec.aux_exponents = extra_exponents
                    .iter()
                    .map(|n| self.lookup(n))
                    .collect::<Result<_>>()?;
                spec
            }
            SuiteEntry::HolderProduct { exponents, cases } => {
                let mut spec = mk(ExperimentKind::HolderProduct { cases: *cases });
                spec.aux_exponents = vec![self.lookup(&exponents[0])?, self.lookup(&exponents[1])?];
                spec
            }
            SuiteEntry::HolderOrlicz { cases } => mk(ExperimentKind::HolderOrlicz { cases: *cases }),
            SuiteEntry::CharNormEquiv { exponent } => {
                let mut spec = mk(ExperimentKind::CharNormEquiv);
                spec.exponent = Some(self.lookup(exponent)?);
                spec
            }
            SuiteEntry::WeightIdentity { exponent, gamma } => {
                let mut spec = mk(ExperimentKind::WeightIdentity { gamma: *gamma });
                spec.exponent = Some(self.lookup(exponent)?);
                spec
            }
            SuiteEntry::Kolmogorov { cases } => mk(ExperimentKind::Kolmogorov { cases: *cases }),
            SuiteEntry::MaximalChain { cases, r } => {
                mk(ExperimentKind::MaximalChain { cases: *cases, r: *r })
            }
            SuiteEntry::ExpLAvgBound { exponent, beta } => {
                let mut spec = mk(ExperimentKind::ExpLAvgBound { beta: *beta });
                spec.exponent = Some(self.lookup(exponent)?);
                spec
            }
            SuiteEntry::PointwiseSharp {
                exponent,
                families,
                gamma,
                eta,
                beta,
                rho_cells_sweep,
            } => {
                let mut spec = mk(ExperimentKind::PointwiseSharp {
                    families: *families,
                    gamma: *gamma,
                    eta: *eta,
                    beta: *beta,
                    rho_cells_sweep: rho_cells_sweep.clone(),
                });
                spec.exponent = Some(self.lookup(exponent)?);
                spec
            }
            SuiteEntry::SharpNormBound {
                exponent,
                r_exponent,
                gamma,
                beta,
            } => {
                let mut spec = mk(ExperimentKind::SharpNormBound {
                    gamma: *gamma,
                    beta: *beta,
                });
                spec.exponent = Some(self.lookup(exponent)?);
                spec.aux_exponents = vec![self.lookup(r_exponent)?];
                spec
            }
            SuiteEntry::Thm31Domination { cases, delta } => mk(ExperimentKind::Thm31Domination {
                cases: *cases,
                delta: *delta,
            }),
            SuiteEntry::Thm31Ratio {
                exponents,
                cases,
                delta,
            } => {
                let mut spec = mk(ExperimentKind::Thm31Ratio {
                    cases: *cases,
                    delta: *delta,
                });
                spec.aux_exponents = vec![self.lookup(&exponents[0])?, self.lookup(&exponents[1])?];
                spec
            }
            SuiteEntry::Thm32Ratio {
                exponents,
                r_exponent,
                cases,
                beta,
            } => {
                let mut spec = mk(ExperimentKind::Thm32Ratio {
                    cases: *cases,
                    beta: *beta,
                });
                spec.aux_exponents = vec![
                    self.lookup(&exponents[0])?,
                    self.lookup(&exponents[1])?,
                    self.lookup(r_exponent)?,
                ];
                spec
            }
            SuiteEntry::FracBound {
                exponents,
                cases,
                alpha,
            } => {
                let mut spec = mk(ExperimentKind::FracBound {
                    cases: *cases,
                    alpha: *alpha,
                });
                spec.aux_exponents = vec![self.lookup(&exponents[0])?, self.lookup(&exponents[1])?];
                spec
            }
            SuiteEntry::MaximalBoundTrend { exponent } => {
                let mut spec = mk(ExperimentKind::MaximalBoundTrend);
                spec.exponent = Some(self.lookup(exponent)?);
                spec
            }
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "domain": {"dim": 1, "half_extent": 2.0, "resolutions": [16, 32]},
        "exponents": {"p2": {"kind": "constant", "params": [2.0], "dim": 1}},
        "suite": [{"kind": "kolmogorov", "cases": 5}],
        "seed": 3,
        "output": "out/run"
    }"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.domain.resolutions, vec![16, 32]);
        let specs = cfg.build_specs().unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].seed, 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("\"seed\": 3", "\"seed\": 3, \"typo_key\": 1");
        assert!(RunConfig::parse(&bad).is_err());
        let bad_entry = MINIMAL.replace(
            "{\"kind\": \"kolmogorov\", \"cases\": 5}",
            "{\"kind\": \"kolmogorov\", \"cases\": 5, \"oops\": true}",
        );
        assert!(RunConfig::parse(&bad_entry).is_err());
        let bad_kind = MINIMAL.replace("kolmogorov", "kolmogorova");
        assert!(RunConfig::parse(&bad_kind).is_err());
    }

    #[test]
    fn descending_resolutions_rejected() {
        let bad = MINIMAL.replace("[16, 32]", "[32, 16]");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn unknown_exponent_name_is_rejected() {
        let cfg = RunConfig::parse(
            &MINIMAL.replace(
                "{\"kind\": \"kolmogorov\", \"cases\": 5}",
                "{\"kind\": \"char_norm_equiv\", \"exponent\": \"nope\"}",
            ),
        )
        .unwrap();
        assert!(cfg.build_specs().is_err());
    }

    #[test]
    fn exponent_descriptors_build() {
        for (kind, params, dim) in [
            ("constant", vec![2.0], 1),
            ("log_perturbed", vec![2.0, 1.0], 1),
            ("bump", vec![2.0, 0.5, 0.0, 1.0], 1),
            ("bump", vec![2.0, 0.5, 0.0, 0.0, 1.0], 2),
            ("radial_step", vec![1.5, 2.5, 1.0, 0.3], 2),
            ("affine", vec![2.0, 1.0], 1),
        ] {
            let desc = ExponentDesc {
                kind: kind.into(),
                params,
                dim,
            };
            desc.build().unwrap_or_else(|e| panic!("{kind}/{dim}: {e}"));
        }
        let bad = ExponentDesc {
            kind: "constant".into(),
            params: vec![],
            dim: 1,
        };
        assert!(bad.build().is_err());
    }
}
