use serde::{Deserialize, Serialize};

use crate::error::StrategyError;
use crate::model::{ComponentId, SystemModel};

/// Runtime bookkeeping for one component within one iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComponentState {
    pub working: bool,
    /// Operating hours since the last maintenance action.
    pub t_op: f64,
    /// Accumulated operating hours over the iteration.
    pub total_op: f64,
    /// Repair age: operating hours since the last replacement.
    pub repair_age: f64,
    /// Pending failure interarrival, measured on the `t_op` clock.
    pub t_f: f64,
    pub n_cm: u32,
    pub n_pm: u32,
    /// Minimal repairs since the last replacement.
    pub n_r: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub id: u32,
    pub p_cms: f64,
}

/// Which components carry a condition monitoring system and how reliably
/// each detects an impending failure.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyConfig {
    p_cms: Vec<f64>,
    monitored: Vec<bool>,
}

impl StrategyConfig {
    /// Corrective-maintenance-only baseline: nothing is monitored.
    pub fn baseline(n_components: usize) -> Self {
        StrategyConfig {
            p_cms: vec![0.0; n_components],
            monitored: vec![false; n_components],
        }
    }

    pub fn from_entries(
        entries: &[StrategyEntry],
        n_components: usize,
    ) -> Result<Self, StrategyError> {
        let mut s = StrategyConfig::baseline(n_components);
        for e in entries {
            if e.id == 0 || e.id as usize > n_components {
                return Err(StrategyError::UnknownComponent(e.id));
            }
            if !(0.0..=1.0).contains(&e.p_cms) {
                return Err(StrategyError::Probability {
                    id: e.id,
                    p: e.p_cms,
                });
            }
            let i = e.id as usize - 1;
            if s.monitored[i] {
                return Err(StrategyError::Duplicate(e.id));
            }
            s.monitored[i] = true;
            s.p_cms[i] = e.p_cms;
        }
        Ok(s)
    }

    /// Parses a strategy file: a JSON list of `{"id": .., "p_cms": ..}`.
    /// Omitted components are unmonitored.
    pub fn from_json(text: &str, n_components: usize) -> Result<Self, StrategyError> {
        let entries: Vec<StrategyEntry> = serde_json::from_str(text)?;
        Self::from_entries(&entries, n_components)
    }

    pub fn entries(&self) -> Vec<StrategyEntry> {
        self.monitored
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| StrategyEntry {
                id: i as u32 + 1,
                p_cms: self.p_cms[i],
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries()).expect("strategy serializes")
    }

    /// Effective detection probability (0 when unmonitored).
    #[inline]
    pub fn p_cms(&self, index: usize) -> f64 {
        self.p_cms[index]
    }

    pub fn is_monitored(&self, id: ComponentId) -> bool {
        self.monitored[id.index()]
    }

    pub fn monitored(&self) -> impl Iterator<Item = ComponentId> + '_ {
        self.monitored
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| ComponentId::from_index(i))
    }

    pub fn n_components(&self) -> usize {
        self.p_cms.len()
    }

    /// Sum of CMS investment over monitored components.
    pub fn total_investment(&self, model: &SystemModel) -> f64 {
        self.monitored()
            .map(|id| model.component(id).cms_investment)
            .sum()
    }
}

/// Outcome of one pass of the mission loop over the whole operating life.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// One-based iteration index.
    pub iteration: u64,
    pub t_op_sys: f64,
    pub t_degraded: f64,
    pub n_f_sys: u32,
    pub n_missions_completed: u32,
    pub n_cm: Vec<u32>,
    pub n_pm: Vec<u32>,
    pub t_op: Vec<f64>,
    pub n_f_module: Vec<u32>,
}

impl IterationRecord {
    pub fn lost_time(&self, t_life: f64) -> f64 {
        t_life - self.t_op_sys
    }
}
