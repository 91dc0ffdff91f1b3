use thiserror::Error;

use crate::model::{ComponentId, ValidationReport};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed system file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid system model:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("tree is not decomposable: component {component} is shared by candidate modules {first} and {second}")]
    SharedComponent {
        component: ComponentId,
        first: usize,
        second: usize,
    },
    #[error("tree references unknown component {0}")]
    UnknownComponent(ComponentId),
    #[error("component {0} belongs to no module")]
    Unassigned(ComponentId),
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("malformed strategy file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("strategy references unknown component {0}")]
    UnknownComponent(u32),
    #[error("strategy lists component {0} more than once")]
    Duplicate(u32),
    #[error("p_cms for component {id} is {p}, outside [0, 1]")]
    Probability { id: u32, p: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum SamplingError {
    #[error("time must be >= 0, got {0}")]
    NegativeTime(f64),
    #[error("Weibull parameters must be positive (scale {scale}, shape {shape})")]
    Parameters { scale: f64, shape: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum SimulationError {
    #[error("negative accrual of {amount} h on component {component} in mission {mission}")]
    NegativeAccrual {
        component: ComponentId,
        mission: usize,
        amount: f64,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("no iteration records to summarize")]
    Empty,
    #[error("campaigns were run on different models ({baseline} vs {candidate})")]
    ModelMismatch { baseline: String, candidate: String },
    #[error("campaigns used different seeds ({baseline} vs {candidate})")]
    SeedMismatch { baseline: u64, candidate: u64 },
    #[error("campaigns have different iteration counts ({baseline} vs {candidate})")]
    LengthMismatch { baseline: usize, candidate: usize },
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("records file: {0}")]
    Format(String),
}
