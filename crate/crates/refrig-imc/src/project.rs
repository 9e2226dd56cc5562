//! A configuration file resolved into ready-to-use objects.

use std::path::{Path, PathBuf};

use refrig_imc_core::{
    default_scenario, presets, JWeights, MimoPlant2x2, PidParams, Scenario, SecondOrderModel,
    SweepGrid,
};

use crate::error::{CliError, CliResult};
use crate::formats::{self, ConfigFile};

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub ts: Option<f64>,
    pub lambda11: Option<f64>,
    pub lambda22: Option<f64>,
    pub weights: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub svg: bool,
}

/// Output directory used when neither the configuration nor the command line
/// names one.
pub const DEFAULT_OUT: &str = "refrig-imc-out";

#[derive(Debug, Clone, PartialEq)]
pub enum PlantSource {
    /// No plant file given: the identified model with the reduced diagonal.
    Shipped,
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Project {
    pub plant: MimoPlant2x2,
    pub plant_source: PlantSource,
    pub sim_plant: MimoPlant2x2,
    pub scenario: Scenario,
    pub ts: f64,
    pub models: [SecondOrderModel; 2],
    pub baseline: [PidParams; 2],
    pub candidate: Option<[PidParams; 2]>,
    pub lambdas: (f64, f64),
    pub n_filter: f64,
    pub weights: JWeights,
    pub out: PathBuf,
    pub grid: SweepGrid,
    pub sweep_enabled: bool,
    pub svg: bool,
    /// The configuration as read, for the run manifest.
    pub config: ConfigFile,
}

impl Project {
    /// Shipped defaults when `config` is `None`.
    pub fn load(config: Option<&Path>, ov: &Overrides) -> CliResult<Self> {
        let (cfg, base) = match config {
            Some(path) => (
                formats::read_json::<ConfigFile>(path)?,
                path.parent().unwrap_or(Path::new("")).to_path_buf(),
            ),
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let path_of = |p: &Option<PathBuf>| p.as_ref().map(|p| formats::resolve(&base, p));

        let (plant, plant_source) = match path_of(&cfg.plant) {
            Some(p) => (formats::load_plant(&p)?, PlantSource::File(p)),
            None => (presets::identified_plant(), PlantSource::Shipped),
        };
        let sim_plant = match path_of(&cfg.sim_plant) {
            Some(p) => formats::load_plant(&p)?,
            None => presets::surrogate_plant(),
        };
        let mut scenario = match path_of(&cfg.scenario) {
            Some(p) => formats::load_scenario(&p)?,
            None => default_scenario(),
        };
        let ts = ov.ts.or(cfg.ts).unwrap_or(scenario.ts);
        if !(ts > 0.0) || !ts.is_finite() {
            return Err(CliError::Invalid(format!("ts must be positive, got {ts}")));
        }
        scenario = scenario.with_ts(ts);
        scenario.validate()?;

        let models = match &cfg.models {
            Some([a, b]) => [a.to_model()?, b.to_model()?],
            None => [presets::g11_reduced(), presets::g22_reduced()],
        };
        let baseline = match &cfg.baseline {
            Some([a, b]) => [a.to_params()?, b.to_params()?],
            None => presets::baseline_controllers(),
        };
        let candidate = match &cfg.candidate {
            Some([a, b]) => Some([a.to_params()?, b.to_params()?]),
            None => None,
        };
        let (l11, l22) = cfg.lambda.preset().lambdas();
        let lambdas = (ov.lambda11.unwrap_or(l11), ov.lambda22.unwrap_or(l22));
        let weights = match ov.weights.clone().or_else(|| path_of(&cfg.weights)) {
            Some(p) => formats::load_weights(&p)?,
            None => JWeights::default(),
        };
        let out = ov
            .out
            .clone()
            .or_else(|| path_of(&cfg.out))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let grid = match &cfg.sweep.grid {
            Some(g) => g.to_grid()?,
            None => SweepGrid::standard(),
        };
        Ok(Self {
            plant,
            plant_source,
            sim_plant,
            scenario,
            ts,
            models,
            baseline,
            candidate,
            lambdas,
            n_filter: refrig_imc_core::imc::DEFAULT_N_FILTER,
            weights,
            out,
            grid,
            sweep_enabled: cfg.sweep.enabled,
            svg: ov.svg,
            config: cfg,
        })
    }

    /// IMC-PID controllers for the configured models and lambdas.
    pub fn tuned(&self) -> CliResult<[PidParams; 2]> {
        let limits = [
            (self.baseline[0].u_min, self.baseline[0].u_max),
            (self.baseline[1].u_min, self.baseline[1].u_max),
        ];
        Ok([
            refrig_imc_core::imc_pid(&self.models[0], self.lambdas.0, self.n_filter, limits[0])?,
            refrig_imc_core::imc_pid(&self.models[1], self.lambdas.1, self.n_filter, limits[1])?,
        ])
    }

    /// Explicit candidate controllers if configured, otherwise the tuned ones.
    pub fn candidate_controllers(&self) -> CliResult<[PidParams; 2]> {
        match self.candidate {
            Some(c) => Ok(c),
            None => self.tuned(),
        }
    }
}
