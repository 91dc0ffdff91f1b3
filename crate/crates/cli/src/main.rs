use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use cbm_core::io::{self as cio, ManifestFile, RunManifest};
use cbm_core::{
    compare_strategies, run_campaign, run_iteration_traced, summarize, Campaign, ModelError,
    ScenarioConfig, StrategyConfig, SystemModel,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cbm",
    version,
    about = "Condition-based maintenance cost-benefit simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system file against every model invariant.
    Validate {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Print the module decomposition of a system.
    Decompose {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Simulate one strategy and write records, summary and manifest.
    Simulate {
        #[command(flatten)]
        system: SystemArg,
        /// Strategy file, or a bundled name (baseline, strategy1, strategy2).
        #[arg(long, default_value = "baseline")]
        strategy: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Simulate a baseline and a candidate strategy and write the CBA report.
    Compare {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value = "baseline")]
        baseline: String,
        #[arg(long)]
        candidate: String,
        #[command(flatten)]
        run: RunArgs,
        /// Keep only components with more mean CM events than this in the
        /// plot-data CSV.
        #[arg(long)]
        min_failures: Option<f64>,
    },
}

#[derive(Args)]
struct SystemArg {
    /// System JSON file; the bundled USV model when omitted.
    #[arg(long)]
    system: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Worker threads; all available cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also print the summary or report JSON to stdout.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write a JSON-lines event trace of one iteration to trace.jsonl.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = 1, requires = "trace")]
    trace_iteration: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Exit status 1: the inputs are invalid. Anything else maps to 2.
#[derive(Debug)]
struct InvalidInput(String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    InvalidInput(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<InvalidInput>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Validate { system, format } => validate(&system, format),
        Command::Decompose { system, format } => {
            let model = load_model(&system)?;
            let stdout = std::io::stdout().lock();
            match format {
                Format::Csv => cio::write_modules_csv(stdout, &model.modules)?,
                Format::Json => {
                    let mut out = stdout;
                    serde_json::to_writer_pretty(&mut out, &cio::module_rows(&model.modules))?;
                    writeln!(out)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            system,
            strategy,
            run,
        } => {
            let model = load_model(&system)?;
            let strategy = load_strategy(&strategy, &model)?;
            simulate(&model, &strategy, &run)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            system,
            baseline,
            candidate,
            run,
            min_failures,
        } => {
            let model = load_model(&system)?;
            let baseline = load_strategy(&baseline, &model)?;
            let candidate = load_strategy(&candidate, &model)?;
            compare(&model, &baseline, &candidate, &run, min_failures)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_system_text(arg: &SystemArg) -> anyhow::Result<String> {
    match &arg.system {
        None => Ok(cio::USV_JSON.to_owned()),
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
    }
}

fn describe(e: &ModelError) -> String {
    match e {
        ModelError::Invalid(report) => report.to_string(),
        other => other.to_string(),
    }
}

fn validate(arg: &SystemArg, format: Option<Format>) -> anyhow::Result<ExitCode> {
    let text = read_system_text(arg)?;
    let result = cbm_core::parse_system(&text);
    if format == Some(Format::Json) {
        let value = match &result {
            Ok(m) => serde_json::json!({
                "valid": true,
                "name": m.name,
                "components": m.n_components(),
                "modules": m.modules.len(),
                "missions": m.missions(),
                "model_hash": m.content_hash(),
                "violations": [],
            }),
            Err(ModelError::Invalid(report)) => serde_json::json!({
                "valid": false,
                "violations": report.violations,
            }),
            Err(e) => serde_json::json!({
                "valid": false,
                "violations": [{"path": "", "message": e.to_string()}],
            }),
        };
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        match &result {
            Ok(m) => println!(
                "valid: {} ({} components, {} modules, {} missions)",
                if m.name.is_empty() {
                    "<unnamed>"
                } else {
                    &m.name
                },
                m.n_components(),
                m.modules.len(),
                m.missions()
            ),
            Err(e) => eprintln!("{}", describe(e)),
        }
    }
    Ok(if result.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn load_model(arg: &SystemArg) -> anyhow::Result<SystemModel> {
    let text = read_system_text(arg)?;
    cbm_core::parse_system(&text).map_err(|e| invalid(describe(&e)))
}

/// A strategy file path, or the name of a bundled strategy.
fn load_strategy(arg: &str, model: &SystemModel) -> anyhow::Result<StrategyConfig> {
    let path = Path::new(arg);
    let text = if path.exists() {
        fs::read_to_string(path).with_context(|| format!("reading {arg}"))?
    } else {
        match arg {
            "baseline" => cio::BASELINE_STRATEGY_JSON.to_owned(),
            "strategy1" => cio::STRATEGY1_JSON.to_owned(),
            "strategy2" => cio::STRATEGY2_JSON.to_owned(),
            _ => return Err(invalid(format!("no strategy file {arg}"))),
        }
    };
    StrategyConfig::from_json(&text, model.n_components())
        .map_err(|e| invalid(format!("{arg}: {e}")))
}

fn scenario(model: &SystemModel, run: &RunArgs) -> anyhow::Result<ScenarioConfig> {
    let mut sc = model.scenario.clone();
    if let Some(seed) = run.seed {
        sc.seed = seed;
    }
    if let Some(n) = run.iterations {
        if n == 0 {
            return Err(invalid("--iterations must be at least 1"));
        }
        sc.iterations = n;
    }
    Ok(sc)
}

fn pool(run: &RunArgs) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = run.threads {
        if t == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        b = b.num_threads(t);
    }
    Ok(b.build()?)
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let p = dir.join(name);
    Ok(BufWriter::new(
        File::create(&p).with_context(|| format!("creating {}", p.display()))?,
    ))
}

fn write_manifest(
    dir: &Path,
    manifest: &RunManifest,
    started: u64,
    threads: usize,
) -> anyhow::Result<()> {
    let file = ManifestFile {
        manifest: manifest.clone(),
        started_unix: started,
        finished_unix: cio::unix_now(),
        threads,
    };
    let mut w = create(dir, "manifest.json")?;
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_trace(
    dir: &Path,
    model: &SystemModel,
    strategy: &StrategyConfig,
    sc: &ScenarioConfig,
    iteration: u64,
) -> anyhow::Result<()> {
    let mut events = Vec::new();
    run_iteration_traced(model, strategy, sc, iteration, &mut |ev| events.push(ev))?;
    let mut w = create(dir, "trace.jsonl")?;
    for ev in &events {
        serde_json::to_writer(&mut w, ev)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn simulate(model: &SystemModel, strategy: &StrategyConfig, run: &RunArgs) -> anyhow::Result<()> {
    let started = cio::unix_now();
    let sc = scenario(model, run)?;
    let pool = pool(run)?;
    fs::create_dir_all(&run.out).with_context(|| format!("creating {}", run.out.display()))?;

    let records = pool.install(|| run_campaign(model, strategy, &sc))?;
    let summary = summarize(&records)?;
    let manifest = RunManifest::new(model, &sc, &[("strategy", strategy)]);

    let mut w = create(&run.out, "records.csv")?;
    cio::write_records_csv(&mut w, &manifest, &records)?;
    w.flush()?;
    let mut w = create(&run.out, "summary.json")?;
    cio::write_summary_json(&mut w, &manifest, &summary)?;
    w.flush()?;
    if run.trace {
        write_trace(&run.out, model, strategy, &sc, run.trace_iteration)?;
    }
    write_manifest(&run.out, &manifest, started, pool.current_num_threads())?;

    if run.format == Some(Format::Json) {
        cio::write_summary_json(std::io::stdout().lock(), &manifest, &summary)?;
    } else {
        println!(
            "{} iterations x {} missions: system failures {:.2} ± {:.2}, operated {:.1} h, degraded {:.1} h",
            summary.iterations,
            model.missions(),
            summary.n_f_sys.mean,
            summary.n_f_sys.ci95,
            summary.t_op_sys.mean,
            summary.t_degraded.mean
        );
        println!(
            "wrote records.csv, summary.json, manifest.json to {}",
            run.out.display()
        );
    }
    Ok(())
}

fn compare(
    model: &SystemModel,
    baseline: &StrategyConfig,
    candidate: &StrategyConfig,
    run: &RunArgs,
    min_failures: Option<f64>,
) -> anyhow::Result<()> {
    let started = cio::unix_now();
    let sc = scenario(model, run)?;
    let pool = pool(run)?;
    fs::create_dir_all(&run.out).with_context(|| format!("creating {}", run.out.display()))?;

    let (b, c) = pool.install(|| {
        (
            run_campaign(model, baseline, &sc),
            run_campaign(model, candidate, &sc),
        )
    });
    let hash = model.content_hash();
    let b = Campaign {
        model_hash: hash.clone(),
        seed: sc.seed,
        records: b?,
    };
    let c = Campaign {
        model_hash: hash,
        seed: sc.seed,
        records: c?,
    };
    let report = compare_strategies(&b, &c, model, &sc, candidate)?;
    let manifest = RunManifest::new(
        model,
        &sc,
        &[("baseline", baseline), ("candidate", candidate)],
    );

    let mut w = create(&run.out, "baseline_records.csv")?;
    cio::write_records_csv(&mut w, &manifest, &b.records)?;
    w.flush()?;
    let mut w = create(&run.out, "candidate_records.csv")?;
    cio::write_records_csv(&mut w, &manifest, &c.records)?;
    w.flush()?;
    let mut w = create(&run.out, "report.json")?;
    cio::write_report_json(&mut w, &manifest, &report)?;
    w.flush()?;
    let mut w = create(&run.out, "plot.csv")?;
    cio::write_plot_csv(&mut w, &manifest, &report, min_failures)?;
    w.flush()?;
    if run.trace {
        write_trace(&run.out, model, candidate, &sc, run.trace_iteration)?;
    }
    write_manifest(&run.out, &manifest, started, pool.current_num_threads())?;

    if run.format == Some(Format::Json) {
        cio::write_report_json(std::io::stdout().lock(), &manifest, &report)?;
    } else {
        println!(
            "LCC baseline {:.0}, candidate {:.0}, cost avoidance {:.0}",
            report.lcc_baseline.total, report.lcc_candidate.total, report.cost_avoidance
        );
        match report.roi {
            Some(r) => println!("investment {:.0}, ROI {:.3}", report.total_investment, r),
            None => println!("investment 0, ROI not applicable"),
        }
        println!(
            "operated {:+.1} h, degraded {:+.1} h per lifetime",
            report.delta_t_op_sys.mean, report.delta_t_degraded.mean
        );
        println!(
            "wrote report.json, plot.csv, records and manifest to {}",
            run.out.display()
        );
    }
    Ok(())
}
