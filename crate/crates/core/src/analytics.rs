//! Iteration statistics and the cost-benefit layer: life-cycle cost, cost
//! avoidance and return on investment of a monitoring strategy.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::model::{ComponentId, ScenarioConfig, SystemModel};
use crate::sim::{IterationRecord, StrategyConfig};

/// z-value of the two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

/// Mean, population standard deviation (divisor N) and the 95%
/// normal-approximation half-width `1.96 std / sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
}

impl Metric {
    /// Two-pass mean and standard deviation. Panics on an empty slice.
    pub fn from_values(values: &[f64]) -> Metric {
        assert!(!values.is_empty(), "metric over empty sample");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        Metric {
            mean,
            std,
            ci95: Z_95 * std / n.sqrt(),
        }
    }

    fn over<F: Fn(&IterationRecord) -> f64>(records: &[IterationRecord], f: F) -> Metric {
        let values: Vec<f64> = records.iter().map(f).collect();
        Metric::from_values(&values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub id: ComponentId,
    pub n_cm: Metric,
    pub n_pm: Metric,
    pub t_op: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub iterations: usize,
    pub t_op_sys: Metric,
    pub t_degraded: Metric,
    pub n_f_sys: Metric,
    pub n_missions_completed: Metric,
    pub components: Vec<ComponentSummary>,
    /// Failures charged to each module, in module order.
    pub module_failures: Vec<Metric>,
}

pub fn summarize(records: &[IterationRecord]) -> Result<SummaryStats, AnalysisError> {
    let first = records.first().ok_or(AnalysisError::Empty)?;
    let n_comp = first.n_cm.len();
    let components = (0..n_comp)
        .map(|i| ComponentSummary {
            id: ComponentId::from_index(i),
            n_cm: Metric::over(records, |r| r.n_cm[i] as f64),
            n_pm: Metric::over(records, |r| r.n_pm[i] as f64),
            t_op: Metric::over(records, |r| r.t_op[i]),
        })
        .collect();
    let module_failures = (0..first.n_f_module.len())
        .map(|j| Metric::over(records, |r| r.n_f_module[j] as f64))
        .collect();
    Ok(SummaryStats {
        iterations: records.len(),
        t_op_sys: Metric::over(records, |r| r.t_op_sys),
        t_degraded: Metric::over(records, |r| r.t_degraded),
        n_f_sys: Metric::over(records, |r| r.n_f_sys as f64),
        n_missions_completed: Metric::over(records, |r| r.n_missions_completed as f64),
        components,
        module_failures,
    })
}

/// The metrics life-cycle cost depends on, either from one iteration or as
/// campaign means.
#[derive(Debug, Clone, PartialEq)]
pub struct MaintenanceTotals {
    pub n_f_sys: f64,
    pub n_cm: Vec<f64>,
    pub n_pm: Vec<f64>,
    pub t_op_sys: f64,
    pub t_degraded: f64,
}

impl From<&IterationRecord> for MaintenanceTotals {
    fn from(r: &IterationRecord) -> Self {
        MaintenanceTotals {
            n_f_sys: r.n_f_sys as f64,
            n_cm: r.n_cm.iter().map(|&v| v as f64).collect(),
            n_pm: r.n_pm.iter().map(|&v| v as f64).collect(),
            t_op_sys: r.t_op_sys,
            t_degraded: r.t_degraded,
        }
    }
}

impl From<&SummaryStats> for MaintenanceTotals {
    fn from(s: &SummaryStats) -> Self {
        MaintenanceTotals {
            n_f_sys: s.n_f_sys.mean,
            n_cm: s.components.iter().map(|c| c.n_cm.mean).collect(),
            n_pm: s.components.iter().map(|c| c.n_pm.mean).collect(),
            t_op_sys: s.t_op_sys.mean,
            t_degraded: s.t_degraded.mean,
        }
    }
}

/// Life-cycle cost split by source; `total` is their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LccBreakdown {
    pub system_failure: f64,
    pub corrective: f64,
    pub preventive: f64,
    pub lost_operation: f64,
    pub degraded: f64,
    pub total: f64,
}

impl LccBreakdown {
    /// System-failure, corrective and preventive costs.
    pub fn maintenance(&self) -> f64 {
        self.system_failure + self.corrective + self.preventive
    }
}

/// `C_f,sys N_f,sys + Σ (C_cm N_cm + C_pm N_pm) + C_OP T_L + d C_OP T_d`,
/// with lost time `T_L = T_life - T_op,sys`.
pub fn lifecycle_cost(
    totals: &MaintenanceTotals,
    model: &SystemModel,
    scenario: &ScenarioConfig,
) -> LccBreakdown {
    let system_failure = scenario.system_failure_cost * totals.n_f_sys;
    let corrective = model
        .components
        .iter()
        .zip(&totals.n_cm)
        .map(|(c, n)| c.cm_cost * n)
        .sum::<f64>();
    let preventive = model
        .components
        .iter()
        .zip(&totals.n_pm)
        .map(|(c, n)| c.pm_cost * n)
        .sum::<f64>();
    let lost_operation = scenario.operating_cost * (scenario.t_life - totals.t_op_sys);
    let degraded = scenario.degraded_factor * scenario.operating_cost * totals.t_degraded;
    LccBreakdown {
        system_failure,
        corrective,
        preventive,
        lost_operation,
        degraded,
        total: system_failure + corrective + preventive + lost_operation + degraded,
    }
}

/// `LCC_o - LCC_n`.
pub fn cost_avoidance(lcc_original: f64, lcc_new: f64) -> f64 {
    lcc_original - lcc_new
}

/// `CA / Σ C_inv` over monitored components; `None` when nothing is
/// monitored (or the investment is zero).
pub fn roi(cost_avoidance: f64, strategy: &StrategyConfig, model: &SystemModel) -> Option<f64> {
    let investment = strategy.total_investment(model);
    (investment > 0.0).then(|| cost_avoidance / investment)
}

/// A finished campaign with the identity needed to pair it with another.
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub model_hash: String,
    pub seed: u64,
    pub records: Vec<IterationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentComparison {
    pub id: ComponentId,
    pub monitored: bool,
    pub p_cms: f64,
    pub baseline_cm: Metric,
    pub baseline_pm: Metric,
    pub candidate_cm: Metric,
    pub candidate_pm: Metric,
    /// Paired per-iteration difference, candidate minus baseline.
    pub delta_cm: Metric,
    pub delta_pm: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbaReport {
    pub iterations: usize,
    pub lcc_baseline: LccBreakdown,
    pub lcc_candidate: LccBreakdown,
    pub cost_avoidance: f64,
    /// Cost avoidance from system-failure, CM and PM costs only.
    pub maintenance_cost_avoidance: f64,
    pub total_investment: f64,
    /// `None` when the candidate monitors nothing.
    pub roi: Option<f64>,
    /// Paired differences, candidate minus baseline.
    pub delta_t_op_sys: Metric,
    pub delta_t_degraded: Metric,
    pub delta_n_f_sys: Metric,
    /// Per-iteration LCC distributions and the paired cost avoidance.
    pub lcc_per_iteration_baseline: Metric,
    pub lcc_per_iteration_candidate: Metric,
    pub cost_avoidance_per_iteration: Metric,
    pub components: Vec<ComponentComparison>,
}

fn paired<F: Fn(&IterationRecord) -> f64>(
    base: &[IterationRecord],
    cand: &[IterationRecord],
    f: F,
) -> Metric {
    let d: Vec<f64> = base.iter().zip(cand).map(|(b, c)| f(c) - f(b)).collect();
    Metric::from_values(&d)
}

/// Compares a candidate monitoring strategy against a baseline campaign run
/// on the same model with the same seed.
pub fn compare_strategies(
    baseline: &Campaign,
    candidate: &Campaign,
    model: &SystemModel,
    scenario: &ScenarioConfig,
    strategy: &StrategyConfig,
) -> Result<CbaReport, AnalysisError> {
    if baseline.model_hash != candidate.model_hash {
        return Err(AnalysisError::ModelMismatch {
            baseline: baseline.model_hash.clone(),
            candidate: candidate.model_hash.clone(),
        });
    }
    if baseline.seed != candidate.seed {
        return Err(AnalysisError::SeedMismatch {
            baseline: baseline.seed,
            candidate: candidate.seed,
        });
    }
    if baseline.records.len() != candidate.records.len() {
        return Err(AnalysisError::LengthMismatch {
            baseline: baseline.records.len(),
            candidate: candidate.records.len(),
        });
    }
    let (b, c) = (&baseline.records, &candidate.records);
    let sb = summarize(b)?;
    let sc = summarize(c)?;
    let lcc_baseline = lifecycle_cost(&(&sb).into(), model, scenario);
    let lcc_candidate = lifecycle_cost(&(&sc).into(), model, scenario);
    let ca = cost_avoidance(lcc_baseline.total, lcc_candidate.total);

    let lcc_of = |r: &IterationRecord| lifecycle_cost(&r.into(), model, scenario).total;
    let lcc_b: Vec<f64> = b.iter().map(lcc_of).collect();
    let lcc_c: Vec<f64> = c.iter().map(lcc_of).collect();
    let ca_h: Vec<f64> = lcc_b.iter().zip(&lcc_c).map(|(x, y)| x - y).collect();

    let components = (0..model.n_components())
        .map(|i| ComponentComparison {
            id: ComponentId::from_index(i),
            monitored: strategy.is_monitored(ComponentId::from_index(i)),
            p_cms: strategy.p_cms(i),
            baseline_cm: sb.components[i].n_cm,
            baseline_pm: sb.components[i].n_pm,
            candidate_cm: sc.components[i].n_cm,
            candidate_pm: sc.components[i].n_pm,
            delta_cm: paired(b, c, |r| r.n_cm[i] as f64),
            delta_pm: paired(b, c, |r| r.n_pm[i] as f64),
        })
        .collect();

    Ok(CbaReport {
        iterations: b.len(),
        lcc_baseline,
        lcc_candidate,
        cost_avoidance: ca,
        maintenance_cost_avoidance: lcc_baseline.maintenance() - lcc_candidate.maintenance(),
        total_investment: strategy.total_investment(model),
        roi: roi(ca, strategy, model),
        delta_t_op_sys: paired(b, c, |r| r.t_op_sys),
        delta_t_degraded: paired(b, c, |r| r.t_degraded),
        delta_n_f_sys: paired(b, c, |r| r.n_f_sys as f64),
        lcc_per_iteration_baseline: Metric::from_values(&lcc_b),
        lcc_per_iteration_candidate: Metric::from_values(&lcc_c),
        cost_avoidance_per_iteration: Metric::from_values(&ca_h),
        components,
    })
}
