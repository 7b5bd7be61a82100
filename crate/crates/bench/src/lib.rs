//! Shared helpers for the benchmark targets.

use std::path::PathBuf;

use tcmum::Scenario;

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn desk() -> Scenario {
    tcmum::io::load_scenario(scenario_dir().join("desk.scn")).expect("desk scenario loads")
}

pub fn micro() -> Scenario {
    tcmum::io::load_scenario(scenario_dir().join("micro.scn")).expect("micro scenario loads")
}
