//! File formats: the bundled USV dataset, run manifests, per-iteration
//! records CSV, summary and report JSON, and the CM/PM plot-data CSV.
//!
//! Nothing written here depends on wall-clock time or thread count, so a
//! rerun with the same manifest reproduces every file byte for byte.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::{CbaReport, SummaryStats};
use crate::error::OutputError;
use crate::model::{parse_system, ScenarioConfig, SystemModel};
use crate::modules::ModuleDef;
use crate::sim::{IterationRecord, StrategyConfig};

pub const RECORDS_SCHEMA: &str = "cbm-records/1";
pub const PLOT_SCHEMA: &str = "cbm-plot/1";
pub const MODULES_SCHEMA: &str = "cbm-modules/1";

pub const USV_JSON: &str = include_str!("../data/usv.json");
pub const BASELINE_STRATEGY_JSON: &str = include_str!("../data/baseline.json");
pub const STRATEGY1_JSON: &str = include_str!("../data/strategy1.json");
pub const STRATEGY2_JSON: &str = include_str!("../data/strategy2.json");

/// The bundled 71-component unmanned surface vehicle model.
pub fn bundled_usv() -> SystemModel {
    parse_system(USV_JSON).expect("bundled USV model is valid")
}

/// Bundled strategy by name: `baseline`, `strategy1` or `strategy2`.
pub fn bundled_strategy(name: &str) -> Option<StrategyConfig> {
    let text = match name {
        "baseline" => BASELINE_STRATEGY_JSON,
        "strategy1" => STRATEGY1_JSON,
        "strategy2" => STRATEGY2_JSON,
        _ => return None,
    };
    Some(StrategyConfig::from_json(text, 71).expect("bundled strategy is valid"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical (compact, id-ordered) form of a strategy.
pub fn strategy_hash(strategy: &StrategyConfig) -> String {
    let canonical = serde_json::to_string(&strategy.entries()).expect("strategy serializes");
    sha256_hex(canonical.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyDigest {
    /// `strategy`, `baseline` or `candidate`.
    pub role: String,
    pub hash: String,
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub model_hash: String,
    pub strategies: Vec<StrategyDigest>,
    /// Effective scenario, including seed and iteration overrides.
    pub scenario: ScenarioConfig,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(
        model: &SystemModel,
        scenario: &ScenarioConfig,
        strategies: &[(&str, &StrategyConfig)],
    ) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            model_hash: model.content_hash(),
            strategies: strategies
                .iter()
                .map(|(role, s)| StrategyDigest {
                    role: (*role).to_owned(),
                    hash: strategy_hash(s),
                })
                .collect(),
            scenario: scenario.clone(),
            seed: scenario.seed,
        }
    }
}

/// The standalone `manifest.json`: the manifest plus run timestamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub manifest: RunManifest,
    /// Seconds since the Unix epoch.
    pub started_unix: u64,
    pub finished_unix: u64,
    pub threads: usize,
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_preamble<W: Write>(
    out: &mut W,
    schema: &str,
    manifest: &RunManifest,
) -> Result<(), OutputError> {
    writeln!(out, "# schema: {schema}")?;
    writeln!(out, "# manifest: {}", serde_json::to_string(manifest)?)?;
    Ok(())
}

pub fn records_header(n_components: usize, n_modules: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "iteration",
        "t_op_sys",
        "t_lost",
        "t_degraded",
        "n_f_sys",
        "n_missions_completed",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for prefix in ["n_cm", "n_pm", "t_op"] {
        h.extend((1..=n_components).map(|i| format!("{prefix}_{i}")));
    }
    h.extend((1..=n_modules).map(|j| format!("n_f_module_{j}")));
    h
}

/// One row per iteration, in iteration order.
pub fn write_records_csv<W: Write>(
    mut out: W,
    manifest: &RunManifest,
    records: &[IterationRecord],
) -> Result<(), OutputError> {
    write_preamble(&mut out, RECORDS_SCHEMA, manifest)?;
    let (n_comp, n_mod) = records
        .first()
        .map_or((0, 0), |r| (r.n_cm.len(), r.n_f_module.len()));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(records_header(n_comp, n_mod))?;
    let t_life = manifest.scenario.t_life;
    for r in records {
        let mut row = vec![
            r.iteration.to_string(),
            r.t_op_sys.to_string(),
            r.lost_time(t_life).to_string(),
            r.t_degraded.to_string(),
            r.n_f_sys.to_string(),
            r.n_missions_completed.to_string(),
        ];
        row.extend(r.n_cm.iter().map(u32::to_string));
        row.extend(r.n_pm.iter().map(u32::to_string));
        row.extend(r.t_op.iter().map(f64::to_string));
        row.extend(r.n_f_module.iter().map(u32::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a records CSV back; returns the embedded manifest and the records.
pub fn read_records_csv<R: BufRead>(
    mut input: R,
) -> Result<(RunManifest, Vec<IterationRecord>), OutputError> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let schema = line.trim_end().strip_prefix("# schema: ").unwrap_or("");
    if schema != RECORDS_SCHEMA {
        return Err(OutputError::Format(format!(
            "expected schema {RECORDS_SCHEMA}, found {:?}",
            line.trim_end()
        )));
    }
    line.clear();
    input.read_line(&mut line)?;
    let manifest_text = line
        .trim_end()
        .strip_prefix("# manifest: ")
        .ok_or_else(|| OutputError::Format("missing manifest line".into()))?;
    let manifest: RunManifest = serde_json::from_str(manifest_text)?;

    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let count = |prefix: &str| {
        headers
            .iter()
            .filter(|h| {
                h.strip_prefix(prefix)
                    .is_some_and(|rest| rest.parse::<usize>().is_ok())
            })
            .count()
    };
    let n_comp = count("n_cm_");
    let n_mod = count("n_f_module_");
    if headers.iter().collect::<Vec<_>>() != records_header(n_comp, n_mod) {
        return Err(OutputError::Format("unexpected column layout".into()));
    }
    let bad = |e: &dyn std::fmt::Display| OutputError::Format(e.to_string());
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let f = |i: usize| row[i].parse::<f64>().map_err(|e| bad(&e));
        let u = |i: usize| row[i].parse::<u32>().map_err(|e| bad(&e));
        let base = 6;
        records.push(IterationRecord {
            iteration: row[0].parse().map_err(|e| bad(&e))?,
            t_op_sys: f(1)?,
            t_degraded: f(3)?,
            n_f_sys: u(4)?,
            n_missions_completed: u(5)?,
            n_cm: (0..n_comp).map(|i| u(base + i)).collect::<Result<_, _>>()?,
            n_pm: (0..n_comp)
                .map(|i| u(base + n_comp + i))
                .collect::<Result<_, _>>()?,
            t_op: (0..n_comp)
                .map(|i| f(base + 2 * n_comp + i))
                .collect::<Result<_, _>>()?,
            n_f_module: (0..n_mod)
                .map(|j| u(base + 3 * n_comp + j))
                .collect::<Result<_, _>>()?,
        });
    }
    Ok((manifest, records))
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    manifest: &'a RunManifest,
    summary: &'a SummaryStats,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    manifest: &'a RunManifest,
    report: &'a CbaReport,
}

pub fn write_summary_json<W: Write>(
    mut out: W,
    manifest: &RunManifest,
    summary: &SummaryStats,
) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(&mut out, &SummaryFile { manifest, summary })?;
    writeln!(out)?;
    Ok(())
}

pub fn write_report_json<W: Write>(
    mut out: W,
    manifest: &RunManifest,
    report: &CbaReport,
) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(&mut out, &ReportFile { manifest, report })?;
    writeln!(out)?;
    Ok(())
}

pub const PLOT_HEADER: [&str; 10] = [
    "id",
    "monitored",
    "baseline_cm_mean",
    "baseline_cm_ci95",
    "baseline_pm_mean",
    "baseline_pm_ci95",
    "candidate_cm_mean",
    "candidate_cm_ci95",
    "candidate_pm_mean",
    "candidate_pm_ci95",
];

/// Grouped bar-chart data: CM and PM means with 95% half-widths per
/// component under both strategies. With `min_failures`, only components
/// whose mean CM count exceeds it under either strategy are kept.
pub fn write_plot_csv<W: Write>(
    mut out: W,
    manifest: &RunManifest,
    report: &CbaReport,
    min_failures: Option<f64>,
) -> Result<(), OutputError> {
    write_preamble(&mut out, PLOT_SCHEMA, manifest)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PLOT_HEADER)?;
    for c in &report.components {
        if let Some(min) = min_failures {
            if c.baseline_cm.mean.max(c.candidate_cm.mean) <= min {
                continue;
            }
        }
        w.write_record([
            c.id.to_string(),
            c.monitored.to_string(),
            c.baseline_cm.mean.to_string(),
            c.baseline_cm.ci95.to_string(),
            c.baseline_pm.mean.to_string(),
            c.baseline_pm.ci95.to_string(),
            c.candidate_cm.mean.to_string(),
            c.candidate_cm.ci95.to_string(),
            c.candidate_pm.mean.to_string(),
            c.candidate_pm.ci95.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleRow {
    pub module: usize,
    pub members: Vec<u32>,
    pub critical: bool,
}

pub fn module_rows(modules: &[ModuleDef]) -> Vec<ModuleRow> {
    modules
        .iter()
        .map(|m| ModuleRow {
            module: m.index,
            members: m.members.iter().map(|c| c.0).collect(),
            critical: m.is_singleton(),
        })
        .collect()
}

/// Module table with members joined by `;`.
pub fn write_modules_csv<W: Write>(mut out: W, modules: &[ModuleDef]) -> Result<(), OutputError> {
    writeln!(out, "# schema: {MODULES_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["module", "members", "critical"])?;
    for r in module_rows(modules) {
        let members: Vec<String> = r.members.iter().map(u32::to_string).collect();
        w.write_record([
            r.module.to_string(),
            members.join(";"),
            r.critical.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
