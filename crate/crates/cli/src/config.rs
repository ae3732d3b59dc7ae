//! JSON configuration documents. Unknown keys are rejected everywhere.

use serde::{Deserialize, Serialize};
use surrband::bands::CoordinateWidth;
use surrband::simulate::{make_spoiler, Procedure, Scenario};
use surrband::surrogate::{optimal_tuning, optimal_tuning_nested};
use surrband::{BandParams, Error, NestedScale, Result, SubspaceSpec, SurrogateTuning, TuningRule};

pub const VERSION: u32 = 1;

fn version() -> u32 {
    VERSION
}

fn one() -> f64 {
    1.0
}

/// Either a rule evaluated against the resolved spaces, or explicit per-level
/// tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TuningSpec {
    Rule {
        rule: TuningRule,
    },
    Explicit {
        eps2: Vec<f64>,
        #[serde(rename = "epsInf")]
        eps_inf: Vec<f64>,
    },
}

impl Default for TuningSpec {
    fn default() -> Self {
        TuningSpec::Rule { rule: TuningRule::Achievable }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BandConfig {
    #[serde(default = "version")]
    pub version: u32,
    pub procedure: Procedure,
    #[serde(default)]
    pub spaces: Option<SubspaceSpec>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "one")]
    pub sigma: f64,
    /// Level budgets for the nested procedure; equal split when absent.
    #[serde(default)]
    pub alpha_split: Option<Vec<f64>>,
    #[serde(default)]
    pub tuning: TuningSpec,
    #[serde(default)]
    pub coordinate_width: CoordinateWidth,
}

/// A band configuration resolved against a sample size.
#[derive(Debug, Clone)]
pub struct ResolvedBand {
    pub procedure: Procedure,
    pub scale: Option<NestedScale>,
    pub params: BandParams,
    pub coordinate_width: CoordinateWidth,
}

impl BandConfig {
    pub fn apply_overrides(&mut self, alpha: Option<f64>, gamma: Option<f64>, sigma: Option<f64>) {
        if alpha.is_some() {
            self.alpha = alpha;
        }
        if gamma.is_some() {
            self.gamma = gamma;
        }
        if let Some(s) = sigma {
            self.sigma = s;
        }
    }

    pub fn resolve(&self, n: usize) -> Result<ResolvedBand> {
        if self.version != VERSION {
            return Err(Error::Config(format!("unsupported config version {}", self.version)));
        }
        let alpha = self.alpha.ok_or_else(|| Error::Config("alpha is required".into()))?;
        let gamma = match (self.gamma, self.procedure) {
            (Some(g), _) => g,
            (None, Procedure::AdaptiveSingle | Procedure::AdaptiveNested) => {
                return Err(Error::Config("gamma is required for adaptive procedures".into()))
            }
            (None, _) => 0.1,
        };
        let scale = self.spaces.as_ref().map(|s| s.build(n)).transpose()?;
        let m = scale.as_ref().map_or(0, NestedScale::len);
        let alpha_split = match (self.procedure, &self.alpha_split) {
            (Procedure::AdaptiveNested, Some(split)) => split.clone(),
            (Procedure::AdaptiveNested, None) => BandParams::equal_split(alpha, m),
            _ => Vec::new(),
        };
        let tuning = match (&self.tuning, &scale) {
            (TuningSpec::Explicit { eps2, eps_inf }, _) => SurrogateTuning::new(eps2.clone(), eps_inf.clone())?,
            (TuningSpec::Rule { .. }, None) => SurrogateTuning::single(0.0, 0.0)?,
            (TuningSpec::Rule { rule }, Some(sc)) => match self.procedure {
                Procedure::AdaptiveNested => {
                    optimal_tuning_nested(sc, alpha, &alpha_split, gamma, self.sigma, *rule)?
                }
                _ if sc.len() == 1 => optimal_tuning(&sc.levels()[0], alpha, gamma, self.sigma, *rule)?,
                _ => {
                    let split = BandParams::equal_split(alpha, m);
                    optimal_tuning_nested(sc, alpha, &split, gamma, self.sigma, *rule)?
                }
            },
        };
        let params = BandParams { alpha, gamma, sigma: self.sigma, alpha_split, tuning };
        params.validate()?;
        Ok(ResolvedBand { procedure: self.procedure, scale, params, coordinate_width: self.coordinate_width })
    }
}

/// The true mean vector of a simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TruthSpec {
    /// Explicit values; their count must equal `n`.
    Values { values: Vec<f64> },
    /// Piecewise constant on `values.len()` equal blocks.
    Blocks { values: Vec<f64> },
    /// A spoiler for the first level of the spaces under the resolved tuning.
    Spoiler { margin: f64 },
}

impl TruthSpec {
    pub fn build(&self, n: usize, band: &ResolvedBand) -> Result<Vec<f64>> {
        match self {
            TruthSpec::Values { values } => {
                if values.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: values.len() });
                }
                Ok(values.clone())
            }
            TruthSpec::Blocks { values } => {
                if values.is_empty() || values.len() > n {
                    return Err(Error::Config("blocks: need 1..=n values".into()));
                }
                let k = values.len();
                Ok((0..n).map(|i| values[i * k / n]).collect())
            }
            TruthSpec::Spoiler { margin } => {
                let scale = band
                    .scale
                    .as_ref()
                    .ok_or_else(|| Error::Config("spoiler truth requires spaces".into()))?;
                let t = &band.params.tuning;
                make_spoiler(&scale.levels()[0], t.eps2[0], t.eps_inf[0], *margin)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "version")]
    pub version: u32,
    pub n: usize,
    pub truth: TruthSpec,
    /// Noise level of the generated data; defaults to the band's `sigma`.
    #[serde(default)]
    pub data_sigma: Option<f64>,
    pub band: BandConfig,
    #[serde(default = "default_reps")]
    pub reps: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub width_threshold: Option<f64>,
}

fn default_reps() -> u64 {
    10_000
}

impl ScenarioConfig {
    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.version != VERSION {
            return Err(Error::Config(format!("unsupported config version {}", self.version)));
        }
        let band = self.band.resolve(self.n)?;
        let truth = self.truth.build(self.n, &band)?;
        Ok(Scenario {
            truth,
            sigma: self.data_sigma.unwrap_or(band.params.sigma),
            procedure: band.procedure,
            scale: band.scale,
            params: band.params,
            reps: self.reps,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "version")]
    pub version: u32,
    pub n: usize,
    /// Single-level spaces; the first level is used when several are given.
    pub spaces: SubspaceSpec,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "lower_bound_rule")]
    pub tuning: TuningSpec,
}

fn lower_bound_rule() -> TuningSpec {
    TuningSpec::Rule { rule: TuningRule::LowerBound }
}
