//! Monte Carlo evaluation of condition-based maintenance strategies on
//! systems described by dynamic fault trees.
//!
//! A [`SystemModel`] is parsed from JSON, decomposed into independent
//! modules, and simulated mission by mission over its operating life. The
//! [`analytics`] module turns iteration records into life-cycle cost,
//! cost avoidance and return on investment.

pub mod analytics;
pub mod error;
pub mod io;
pub mod model;
pub mod modules;
pub mod sim;
pub mod stochastic;

pub use analytics::{
    compare_strategies, cost_avoidance, lifecycle_cost, roi, summarize, Campaign, CbaReport,
    LccBreakdown, MaintenanceTotals, Metric, SummaryStats,
};
pub use error::{
    AnalysisError, DecompositionError, ModelError, OutputError, SamplingError, SimulationError,
    StrategyError,
};
pub use model::{
    parse_system, validate, validate_document, ComponentId, ComponentSpec, GateNode, Role,
    ScenarioConfig, SystemDocument, SystemModel, ValidationReport, Violation,
};
pub use modules::{criticality, decompose, ModuleDef};
pub use sim::{
    run_campaign, run_iteration, run_iteration_traced, IterationRecord, StrategyConfig,
    StrategyEntry, TraceEvent,
};
