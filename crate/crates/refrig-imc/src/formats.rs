//! JSON file formats for plants, scenarios, models, controllers, weights and
//! the project configuration.
//!
//! Polynomial coefficients are listed in ascending powers: of `s` for
//! continuous channels, of `z^-1` for discrete ones.

use std::fs;
use std::path::{Path, PathBuf};

use refrig_imc_core::scenario::{Disturbance, OperatingPoint};
use refrig_imc_core::{
    presets, ContinuousTF, DiscreteTF, JWeights, LambdaPreset, Lti, MimoPlant2x2, PidParams,
    Scenario, SecondOrderModel, SweepGrid,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfSpec {
    pub domain: Domain,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<f64>,
}

impl TfSpec {
    pub fn to_lti(&self) -> CliResult<Lti> {
        Ok(match self.domain {
            Domain::Continuous => {
                if self.ts.is_some() {
                    return Err(CliError::Invalid("continuous channels take no ts".into()));
                }
                Lti::Continuous(ContinuousTF::new(self.num.clone(), self.den.clone())?)
            }
            Domain::Discrete => {
                let ts = self
                    .ts
                    .ok_or_else(|| CliError::Invalid("discrete channels need ts".into()))?;
                Lti::Discrete(DiscreteTF::new(self.num.clone(), self.den.clone(), ts)?)
            }
        })
    }

    pub fn from_lti(g: &Lti) -> Self {
        match g {
            Lti::Continuous(c) => Self {
                domain: Domain::Continuous,
                num: c.num().coeffs().to_vec(),
                den: c.den().coeffs().to_vec(),
                ts: None,
            },
            Lti::Discrete(d) => Self {
                domain: Domain::Discrete,
                num: d.num().coeffs().to_vec(),
                den: d.den().coeffs().to_vec(),
                ts: Some(d.ts()),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantPreset {
    Identified,
    Surrogate,
}

/// Either a named shipped plant or four explicit channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum PlantSpec {
    Preset {
        preset: PlantPreset,
    },
    Channels {
        g11: TfSpec,
        g12: TfSpec,
        g21: TfSpec,
        g22: TfSpec,
    },
}

impl PlantSpec {
    pub fn to_plant(&self) -> CliResult<MimoPlant2x2> {
        match self {
            PlantSpec::Preset {
                preset: PlantPreset::Identified,
            } => Ok(presets::identified_plant()),
            PlantSpec::Preset {
                preset: PlantPreset::Surrogate,
            } => Ok(presets::surrogate_plant()),
            PlantSpec::Channels { g11, g12, g21, g22 } => Ok(MimoPlant2x2::new(
                g11.to_lti()?,
                g12.to_lti()?,
                g21.to_lti()?,
                g22.to_lti()?,
            )?),
        }
    }

    pub fn from_plant(p: &MimoPlant2x2) -> Self {
        use refrig_imc_core::Channel::*;
        PlantSpec::Channels {
            g11: TfSpec::from_lti(p.channel(G11)),
            g12: TfSpec::from_lti(p.channel(G12)),
            g21: TfSpec::from_lti(p.channel(G21)),
            g22: TfSpec::from_lti(p.channel(G22)),
        }
    }
}

pub fn load_plant(path: &Path) -> CliResult<MimoPlant2x2> {
    read_json::<PlantSpec>(path)?
        .to_plant()
        .map_err(|e| match e {
            CliError::Core(err) => CliError::parse(path, err),
            other => other,
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPointSpec {
    pub y0: [f64; 2],
    pub u0: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub name: String,
    pub output: usize,
    pub profile: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub duration: f64,
    pub ts: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_point: Option<OperatingPointSpec>,
    pub setpoints: [Vec<(f64, f64)>; 2],
    #[serde(default)]
    pub disturbances: Vec<DisturbanceSpec>,
    pub windows: Vec<(f64, f64)>,
}

impl ScenarioSpec {
    pub fn to_scenario(&self) -> CliResult<Scenario> {
        let operating_point = self
            .operating_point
            .map_or_else(OperatingPoint::default, |o| OperatingPoint {
                y0: o.y0,
                u0: o.u0,
            });
        let sc = Scenario {
            duration: self.duration,
            ts: self.ts,
            operating_point,
            setpoints: self.setpoints.clone(),
            disturbances: self
                .disturbances
                .iter()
                .map(|d| Disturbance {
                    name: d.name.clone(),
                    output: d.output,
                    profile: d.profile.clone(),
                })
                .collect(),
            windows: self.windows.clone(),
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn from_scenario(sc: &Scenario) -> Self {
        let op = sc.operating_point;
        Self {
            duration: sc.duration,
            ts: sc.ts,
            operating_point: Some(OperatingPointSpec {
                y0: op.y0,
                u0: op.u0,
            }),
            setpoints: sc.setpoints.clone(),
            disturbances: sc
                .disturbances
                .iter()
                .map(|d| DisturbanceSpec {
                    name: d.name.clone(),
                    output: d.output,
                    profile: d.profile.clone(),
                })
                .collect(),
            windows: sc.windows.clone(),
        }
    }
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    read_json::<ScenarioSpec>(path)?
        .to_scenario()
        .map_err(|e| match e {
            CliError::Core(err) => CliError::parse(path, err),
            other => other,
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kp: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl ModelSpec {
    pub fn to_model(&self) -> CliResult<SecondOrderModel> {
        Ok(SecondOrderModel::new(self.kp, self.tau1, self.tau2)?)
    }

    pub fn from_model(m: &SecondOrderModel) -> Self {
        Self {
            kp: m.kp,
            tau1: m.tau1,
            tau2: m.tau2,
        }
    }
}

/// PID parameters; a missing `tau_i` disables the integrator, a missing
/// `t_track` takes the default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub k: f64,
    #[serde(default)]
    pub tau_i: Option<f64>,
    #[serde(default)]
    pub tau_d: f64,
    #[serde(default = "default_n_filter")]
    pub n_filter: f64,
    pub u_min: f64,
    pub u_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_track: Option<f64>,
}

fn default_n_filter() -> f64 {
    refrig_imc_core::imc::DEFAULT_N_FILTER
}

impl ControllerSpec {
    pub fn to_params(&self) -> CliResult<PidParams> {
        let tau_i = self.tau_i.unwrap_or(f64::INFINITY);
        let p = match self.t_track {
            Some(t) => PidParams::with_t_track(
                self.k,
                tau_i,
                self.tau_d,
                self.n_filter,
                self.u_min,
                self.u_max,
                t,
            )?,
            None => PidParams::new(
                self.k,
                tau_i,
                self.tau_d,
                self.n_filter,
                self.u_min,
                self.u_max,
            )?,
        };
        Ok(p)
    }

    pub fn from_params(p: &PidParams) -> Self {
        Self {
            k: p.k,
            tau_i: p.tau_i.is_finite().then_some(p.tau_i),
            tau_d: p.tau_d,
            n_filter: p.n_filter,
            u_min: p.u_min,
            u_max: p.u_max,
            t_track: Some(p.t_track),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Bare([f64; 8]),
    Named { weights: [f64; 8] },
}

impl WeightsSpec {
    pub fn to_weights(&self) -> CliResult<JWeights> {
        let w = match self {
            WeightsSpec::Bare(w) | WeightsSpec::Named { weights: w } => *w,
        };
        Ok(JWeights::new(w)?)
    }
}

pub fn load_weights(path: &Path) -> CliResult<JWeights> {
    read_json::<WeightsSpec>(path)?
        .to_weights()
        .map_err(|e| match e {
            CliError::Core(err) => CliError::parse(path, err),
            other => other,
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedLambda {
    Table3,
    Prose,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Named(NamedLambda),
    Explicit { lambda11: f64, lambda22: f64 },
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec::Named(NamedLambda::Table3)
    }
}

impl LambdaSpec {
    pub fn preset(&self) -> LambdaPreset {
        match *self {
            LambdaSpec::Named(NamedLambda::Table3) => LambdaPreset::Table3,
            LambdaSpec::Named(NamedLambda::Prose) => LambdaPreset::Prose,
            LambdaSpec::Explicit { lambda11, lambda22 } => {
                LambdaPreset::Explicit(lambda11, lambda22)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Explicit {
        lambda11: Vec<f64>,
        lambda22: Vec<f64>,
    },
    Uniform {
        start: f64,
        step: f64,
        count: usize,
    },
}

impl GridSpec {
    pub fn to_grid(&self) -> CliResult<SweepGrid> {
        Ok(match self {
            GridSpec::Explicit { lambda11, lambda22 } => {
                SweepGrid::new(lambda11.clone(), lambda22.clone())?
            }
            GridSpec::Uniform { start, step, count } => SweepGrid::uniform(*start, *step, *count)?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub enabled: bool,
    /// Defaults to the 11x11 grid from 0.01 in steps of 0.05.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

/// Project configuration as written on disk. Relative paths are resolved
/// against the directory holding the file; every field is optional and
/// falls back to the shipped defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Identified plant used by `rga` and `reduce`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plant: Option<PathBuf>,
    /// Plant used for closed-loop simulation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim_plant: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<PathBuf>,
    /// Reduced models `[G11, G22]` used for tuning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<[ModelSpec; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<[ControllerSpec; 2]>,
    /// Replaces the tuned controllers when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<[ControllerSpec; 2]>,
    #[serde(default)]
    pub lambda: LambdaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub sweep: SweepSpec,
}

/// Resolves `p` against `base` unless it is absolute.
pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
