//! The lifetime simulator: an iteration loop over independent system
//! lifetimes, each a mission loop of `T_life / T_m` consecutive missions.

pub mod mission;
pub mod state;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::SimulationError;
use crate::model::{ComponentId, ScenarioConfig, SystemModel};
use crate::stochastic::{sample_first_interarrival, IterationStreams};

pub use mission::{
    assess_cbm, assess_modules, assess_starting_components, settle_mission,
    verify_component_failures, MissionScratch, MissionTally, ModuleAssessment, NEVER,
};
pub use state::{ComponentState, IterationRecord, StrategyConfig, StrategyEntry};

/// Debug trace of one iteration, emitted in simulation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    PreventiveMaintenance {
        mission: usize,
        component: ComponentId,
    },
    MissionStart {
        mission: usize,
    },
    SystemFailure {
        mission: usize,
        module: usize,
        time: f64,
    },
    MissionEnd {
        mission: usize,
        completed: bool,
        operated: f64,
        degraded: f64,
    },
    CorrectiveMaintenance {
        mission: usize,
        component: ComponentId,
        time: f64,
        replaced: bool,
    },
}

/// Simulates one system lifetime on iteration `h`'s streams.
pub fn run_iteration(
    model: &SystemModel,
    strategy: &StrategyConfig,
    scenario: &ScenarioConfig,
    iteration: u64,
) -> Result<IterationRecord, SimulationError> {
    run_iteration_traced(model, strategy, scenario, iteration, &mut |_| {})
}

pub fn run_iteration_traced(
    model: &SystemModel,
    strategy: &StrategyConfig,
    scenario: &ScenarioConfig,
    iteration: u64,
    trace: &mut dyn FnMut(TraceEvent),
) -> Result<IterationRecord, SimulationError> {
    let n = model.n_components();
    let t_m = scenario.t_m;
    let n_missions = scenario
        .missions()
        .expect("validated scenario has an integer mission count");
    let mut streams = IterationStreams::new(scenario.seed, iteration, n);
    let mut scratch = MissionScratch::new(n);

    let mut states: Vec<ComponentState> = model
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| ComponentState {
            working: true,
            t_f: sample_first_interarrival(c.scale, c.shape, streams.lifetime(i)),
            ..ComponentState::default()
        })
        .collect();

    let mut t_op_sys = 0.0;
    let mut t_degraded = 0.0;
    let mut n_f_sys = 0u32;
    let mut n_completed = 0u32;
    let mut n_f_module = vec![0u32; model.modules.len()];

    for mission in 1..=n_missions {
        for id in assess_cbm(&mut states, model, strategy, t_m, &mut streams) {
            trace(TraceEvent::PreventiveMaintenance {
                mission,
                component: id,
            });
        }
        trace(TraceEvent::MissionStart { mission });

        scratch.reset();
        let any_failed = assess_starting_components(&mut states, model, t_m, &mut scratch);
        let mut t_f_sys = None;
        if any_failed {
            let assessment = assess_modules(&mut states, model, t_m, &mut scratch);
            if let Some((j, t)) = assessment.system_failure {
                n_f_module[j] += 1;
                trace(TraceEvent::SystemFailure {
                    mission,
                    module: j + 1,
                    time: t,
                });
                verify_component_failures(&mut states, t, &mut scratch);
                t_f_sys = Some(t);
            }
        }

        let mut cm_events = Vec::new();
        let tally = settle_mission(
            &mut states,
            model,
            t_m,
            t_f_sys,
            &scratch,
            &mut streams,
            mission,
            |component, time, replaced| cm_events.push((component, time, replaced)),
        )?;
        t_op_sys += tally.operated;
        t_degraded += tally.degraded;
        if tally.completed {
            n_completed += 1;
        } else {
            n_f_sys += 1;
        }
        trace(TraceEvent::MissionEnd {
            mission,
            completed: tally.completed,
            operated: tally.operated,
            degraded: tally.degraded,
        });
        for (component, time, replaced) in cm_events {
            trace(TraceEvent::CorrectiveMaintenance {
                mission,
                component,
                time,
                replaced,
            });
        }
    }

    for st in &mut states {
        st.total_op += st.t_op;
    }

    Ok(IterationRecord {
        iteration,
        t_op_sys,
        t_degraded,
        n_f_sys,
        n_missions_completed: n_completed,
        n_cm: states.iter().map(|s| s.n_cm).collect(),
        n_pm: states.iter().map(|s| s.n_pm).collect(),
        t_op: states.iter().map(|s| s.total_op).collect(),
        n_f_module,
    })
}

/// Runs `scenario.iterations` independent lifetimes in parallel on the
/// current rayon pool. Records come back ordered by iteration index.
pub fn run_campaign(
    model: &SystemModel,
    strategy: &StrategyConfig,
    scenario: &ScenarioConfig,
) -> Result<Vec<IterationRecord>, SimulationError> {
    (1..=scenario.iterations as u64)
        .into_par_iter()
        .map(|h| run_iteration(model, strategy, scenario, h))
        .collect()
}
