//! The JSON files under `data/` must describe exactly the built-in presets.
//! Run with `REFRIG_IMC_REGENERATE=1` to rewrite them.

use std::path::PathBuf;

use refrig_imc::formats::{self, PlantSpec, ScenarioSpec};
use refrig_imc::{Overrides, Project};
use refrig_imc_core::{default_scenario, presets, JWeights};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn check(name: &str, expected: String) {
    let path = data(name);
    if std::env::var_os("REFRIG_IMC_REGENERATE").is_some() {
        std::fs::write(&path, &expected).unwrap();
    }
    let on_disk = std::fs::read_to_string(&path).unwrap();
    assert_eq!(on_disk, expected, "{} is stale", path.display());
}

#[test]
fn identified_plant_file() {
    check(
        "identified_plant.json",
        formats::to_json(&PlantSpec::from_plant(&presets::identified_plant())),
    );
    assert_eq!(
        formats::load_plant(&data("identified_plant.json")).unwrap(),
        presets::identified_plant()
    );
}

#[test]
fn surrogate_plant_file() {
    check(
        "surrogate_plant.json",
        formats::to_json(&PlantSpec::from_plant(&presets::surrogate_plant())),
    );
    assert_eq!(
        formats::load_plant(&data("surrogate_plant.json")).unwrap(),
        presets::surrogate_plant()
    );
}

#[test]
fn scenario_file() {
    check(
        "default_scenario.json",
        formats::to_json(&ScenarioSpec::from_scenario(&default_scenario())),
    );
    assert_eq!(
        formats::load_scenario(&data("default_scenario.json")).unwrap(),
        default_scenario()
    );
}

#[test]
fn weights_files() {
    assert_eq!(
        formats::load_weights(&data("weights_equal.json")).unwrap(),
        JWeights::default()
    );
    let w = formats::load_weights(&data("weights_tracking_only.json")).unwrap();
    assert_eq!(w.as_array()[6..], [0.0, 0.0]);
}

#[test]
fn project_file_matches_no_config() {
    let ov = Overrides::default();
    let from_file = Project::load(Some(&data("project.json")), &ov).unwrap();
    let shipped = Project::load(None, &ov).unwrap();
    assert_eq!(from_file.plant, shipped.plant);
    assert_eq!(from_file.sim_plant, shipped.sim_plant);
    assert_eq!(from_file.scenario, shipped.scenario);
    assert_eq!(from_file.models, shipped.models);
    assert_eq!(from_file.baseline, shipped.baseline);
    assert_eq!(from_file.lambdas, shipped.lambdas);
    assert_eq!(from_file.weights, shipped.weights);
    assert_eq!(from_file.grid, shipped.grid);
    assert_eq!(from_file.out, data("out"));
}
