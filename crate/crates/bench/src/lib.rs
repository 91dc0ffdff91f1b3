//! Benchmark fixtures.

use cbm_core::{ScenarioConfig, SystemModel};

/// The bundled USV model with its scenario shortened to `iterations`
/// lifetimes of `missions` missions each.
pub fn usv_scenario(iterations: usize, missions: usize) -> (SystemModel, ScenarioConfig) {
    let model = cbm_core::io::bundled_usv();
    let mut scenario = model.scenario.clone();
    scenario.iterations = iterations;
    scenario.t_life = scenario.t_m * missions as f64;
    (model, scenario)
}
