//! One mission of the mission loop: CBM assessment, starting-component
//! evaluation, module assessment with dynamic gates, failure verification
//! and settlement.

use crate::error::SimulationError;
use crate::model::{ComponentId, GateNode, Role, SystemModel};
use crate::sim::state::{ComponentState, StrategyConfig};
use crate::stochastic::{cms_detects, sample_conditional_interarrival, IterationStreams};

/// "Does not fail this mission."
pub const NEVER: f64 = f64::INFINITY;

/// Per-mission scratch: candidate failure time of every component within the
/// mission clock, and the activation time of spares put into service.
#[derive(Debug, Clone)]
pub struct MissionScratch {
    pub fail_at: Vec<f64>,
    pub activated_at: Vec<f64>,
}

impl MissionScratch {
    pub fn new(n_components: usize) -> Self {
        MissionScratch {
            fail_at: vec![NEVER; n_components],
            activated_at: vec![NEVER; n_components],
        }
    }

    pub fn reset(&mut self) {
        self.fail_at.fill(NEVER);
        self.activated_at.fill(NEVER);
    }

    pub fn is_failed(&self, index: usize) -> bool {
        self.fail_at[index] < NEVER
    }
}

/// Result of assessing every module after a mission with failures.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleAssessment {
    /// Within-mission failure time of each module, `None` if it survived.
    pub t_k: Vec<Option<f64>>,
    /// Zero-based module charged with the system failure and `t_f,sys`.
    pub system_failure: Option<(usize, f64)>,
}

/// Mission-level tallies produced by [`settle_mission`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MissionTally {
    pub operated: f64,
    pub degraded: f64,
    pub completed: bool,
}

/// Aging rate of component `i` while not actively replacing a primary.
#[inline]
fn base_aging(model: &SystemModel, i: usize) -> f64 {
    model.components[i].dormant_aging()
}

/// Age accrued by component `i` over mission time `[0, upto]`.
#[inline]
fn accrued(model: &SystemModel, scratch: &MissionScratch, i: usize, upto: f64) -> f64 {
    let q = base_aging(model, i);
    let act = scratch.activated_at[i];
    if act < upto {
        q * act + (upto - act)
    } else {
        q * upto
    }
}

/// Pre-mission condition-based maintenance. Every monitored component with
/// operating time that would fail the coming mission is flagged by its CMS
/// with probability `p_cms` and, if flagged, preventively maintained.
/// Returns the components that received PM.
pub fn assess_cbm(
    states: &mut [ComponentState],
    model: &SystemModel,
    strategy: &StrategyConfig,
    t_m: f64,
    streams: &mut IterationStreams,
) -> Vec<ComponentId> {
    let mut maintained = Vec::new();
    for (i, st) in states.iter_mut().enumerate() {
        let p = strategy.p_cms(i);
        if p <= 0.0 || st.t_op == 0.0 {
            continue;
        }
        let required = base_aging(model, i) * t_m + st.t_op;
        if required < st.t_f {
            continue;
        }
        if !cms_detects(p, streams.cms(i)) {
            continue;
        }
        let spec = &model.components[i];
        st.total_op += st.t_op;
        st.repair_age += st.t_op;
        st.n_pm += 1;
        st.t_op = 0.0;
        st.t_f = sample_conditional_interarrival(
            spec.scale,
            spec.shape,
            st.repair_age,
            streams.lifetime(i),
        );
        maintained.push(ComponentId::from_index(i));
    }
    maintained
}

/// Evaluates every component against the mission: starting components fail
/// unless `T_m + t_op < t_f`; dormant spares unless `q T_m + t_op < t_f`.
/// Failures mark the component not working and record the within-mission
/// failure time. Returns whether anything failed.
pub fn assess_starting_components(
    states: &mut [ComponentState],
    model: &SystemModel,
    t_m: f64,
    scratch: &mut MissionScratch,
) -> bool {
    let mut any = false;
    for (i, st) in states.iter_mut().enumerate() {
        st.working = true;
        let q = base_aging(model, i);
        if q * t_m + st.t_op < st.t_f {
            continue;
        }
        st.working = false;
        any = true;
        scratch.fail_at[i] = if model.components[i].role == Role::Starting {
            st.t_f - st.t_op
        } else {
            (st.t_f - st.t_op) / q
        };
    }
    any
}

/// Within-mission failure time of a gate, or [`NEVER`].
fn evaluate(
    node: &GateNode,
    states: &mut [ComponentState],
    t_m: f64,
    scratch: &mut MissionScratch,
) -> f64 {
    match node {
        GateNode::Basic(id) => scratch.fail_at[id.index()],
        GateNode::Or { children, .. } => children
            .iter()
            .map(|c| evaluate(c, states, t_m, scratch))
            .fold(NEVER, f64::min),
        GateNode::Fdep {
            trigger,
            dependents,
            ..
        } => {
            let t = evaluate(trigger, states, t_m, scratch);
            dependents
                .iter()
                .map(|c| evaluate(c, states, t_m, scratch))
                .fold(t, f64::min)
        }
        GateNode::And { children, .. } => children
            .iter()
            .map(|c| evaluate(c, states, t_m, scratch))
            .fold(0.0, f64::max),
        GateNode::Voting { k, children, .. } => {
            let mut times: Vec<f64> = children
                .iter()
                .map(|c| evaluate(c, states, t_m, scratch))
                .collect();
            times.sort_by(f64::total_cmp);
            times[*k - 1]
        }
        GateNode::Spare {
            primary, spares, ..
        } => {
            let mut t = evaluate(primary, states, t_m, scratch);
            if t == NEVER {
                return NEVER;
            }
            for s in spares {
                let GateNode::Basic(id) = s else {
                    unreachable!("validated: spares are basic")
                };
                let i = id.index();
                if scratch.fail_at[i] <= t {
                    // Failed while dormant before it was needed.
                    continue;
                }
                scratch.activated_at[i] = t;
                let st = &mut states[i];
                let end = t + (st.t_f - st.t_op);
                if end <= t_m {
                    st.working = false;
                    scratch.fail_at[i] = end;
                    t = end;
                } else {
                    st.working = true;
                    scratch.fail_at[i] = NEVER;
                    return NEVER;
                }
            }
            t
        }
    }
}

/// Assesses every module's subtree. The earliest module failure is the
/// system failure; ties go to the lowest module index.
pub fn assess_modules(
    states: &mut [ComponentState],
    model: &SystemModel,
    t_m: f64,
    scratch: &mut MissionScratch,
) -> ModuleAssessment {
    let mut t_k = Vec::with_capacity(model.modules.len());
    let mut system_failure: Option<(usize, f64)> = None;
    for (j, m) in model.modules.iter().enumerate() {
        let t = evaluate(&m.subtree, states, t_m, scratch);
        if t <= t_m {
            t_k.push(Some(t));
            if system_failure.is_none_or(|(_, best)| t < best) {
                system_failure = Some((j, t));
            }
        } else {
            t_k.push(None);
        }
    }
    ModuleAssessment {
        t_k,
        system_failure,
    }
}

/// After a system failure at `t_f_sys`, failures scheduled later in the
/// mission never happened: those components are restored, and spares that
/// would only have been activated later stay dormant.
pub fn verify_component_failures(
    states: &mut [ComponentState],
    t_f_sys: f64,
    scratch: &mut MissionScratch,
) {
    for (i, st) in states.iter_mut().enumerate() {
        if scratch.fail_at[i] < NEVER && scratch.fail_at[i] > t_f_sys {
            scratch.fail_at[i] = NEVER;
            st.working = true;
        }
        if scratch.activated_at[i] > t_f_sys {
            scratch.activated_at[i] = NEVER;
        }
    }
}

/// Settles a mission: degraded time, operating-time accrual of working
/// components, and corrective maintenance (minimal repair or replacement) of
/// failed ones. `t_f_sys` is `None` for a completed mission.
///
/// Failed components draw their next interarrival in component order.
#[allow(clippy::too_many_arguments)]
pub fn settle_mission(
    states: &mut [ComponentState],
    model: &SystemModel,
    t_m: f64,
    t_f_sys: Option<f64>,
    scratch: &MissionScratch,
    streams: &mut IterationStreams,
    mission: usize,
    mut on_cm: impl FnMut(ComponentId, f64, bool),
) -> Result<MissionTally, SimulationError> {
    let end = t_f_sys.unwrap_or(t_m);

    // Degraded from the earliest failure that did not itself end the mission.
    let first_noncausal = scratch
        .fail_at
        .iter()
        .copied()
        .filter(|&t| match t_f_sys {
            Some(sys) => t < sys,
            None => t <= t_m,
        })
        .fold(NEVER, f64::min);
    let degraded = if first_noncausal < NEVER {
        end - first_noncausal
    } else {
        0.0
    };

    for (i, st) in states.iter_mut().enumerate() {
        let fail = scratch.fail_at[i];
        if fail == NEVER {
            let add = accrued(model, scratch, i, end);
            if add < 0.0 {
                return Err(SimulationError::NegativeAccrual {
                    component: ComponentId::from_index(i),
                    mission,
                    amount: add,
                });
            }
            st.t_op += add;
            continue;
        }
        let spec = &model.components[i];
        let add = st.t_op + accrued(model, scratch, i, fail);
        if add < 0.0 {
            return Err(SimulationError::NegativeAccrual {
                component: ComponentId::from_index(i),
                mission,
                amount: add,
            });
        }
        st.total_op += add;
        st.repair_age += add;
        st.n_cm += 1;
        st.n_r += 1;
        let replaced = st.n_r > spec.max_min_repairs;
        if replaced {
            st.repair_age = 0.0;
            st.n_r = 0;
        }
        st.t_op = 0.0;
        st.working = true;
        st.t_f = sample_conditional_interarrival(
            spec.scale,
            spec.shape,
            st.repair_age,
            streams.lifetime(i),
        );
        on_cm(ComponentId::from_index(i), fail, replaced);
    }

    Ok(MissionTally {
        operated: end,
        degraded,
        completed: t_f_sys.is_none(),
    })
}
