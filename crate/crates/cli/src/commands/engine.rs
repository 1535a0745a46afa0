//! `landauer engine`: run one reset/extraction cycle and report the trace,
//! the net work, power, and efficiency, and every analytic bound.

use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use landauer::engine::{
    efficiency_bounds, min_time_positive_output, net_work_bound, power_bound, quasistatic_net_work,
    run_cycle, CycleMode, CycleReport, EngineConfig,
};

use crate::config::{resolve, FileConfig};
use crate::output::{ensure_dir, finite_or_none, g17, write_json, write_text, Format};

#[derive(clap::Args)]
pub struct EngineArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cold bath temperature (reset half).
    #[arg(long)]
    pub t_cold: Option<f64>,
    /// Hot bath temperature (extraction half).
    #[arg(long)]
    pub t_hot: Option<f64>,
    /// Maximum level splitting.
    #[arg(long)]
    pub e_max: Option<f64>,
    /// Stages per half-cycle.
    #[arg(long)]
    pub num_steps: Option<usize>,
    /// Per-unit-time swap probability.
    #[arg(long)]
    pub swap_prob: Option<f64>,
    /// Thermalization steps per stage.
    #[arg(long)]
    pub therm_steps: Option<u32>,
    /// Which cycle to report.
    #[arg(long, value_enum)]
    pub mode: Option<CliCycleMode>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Trace file format (the summary is always JSON).
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CliCycleMode {
    FirstCycle,
    LimitCycle,
}

impl std::str::FromStr for CliCycleMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-cycle" | "first" => Ok(Self::FirstCycle),
            "limit-cycle" | "limit" => Ok(Self::LimitCycle),
            other => anyhow::bail!("mode must be first-cycle or limit-cycle, got `{other}`"),
        }
    }
}

impl From<CliCycleMode> for CycleMode {
    fn from(mode: CliCycleMode) -> Self {
        match mode {
            CliCycleMode::FirstCycle => CycleMode::FirstCycle,
            CliCycleMode::LimitCycle => CycleMode::LimitCycle,
        }
    }
}

#[derive(Serialize)]
struct EfficiencySummary {
    carnot: f64,
    quasistatic: f64,
    lower: f64,
    /// Net extracted work per t_hot ln 2; null when the cycle consumed work.
    realized: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    config: EngineConfig,
    mode: CycleMode,
    converged: bool,
    cycles_run: u64,
    net_work: f64,
    reset_work: f64,
    extraction_work: f64,
    duration: u64,
    power: Option<f64>,
    quasistatic_net_work: f64,
    net_work_bound: f64,
    power_bound: Option<f64>,
    efficiency: EfficiencySummary,
    engine_regime: bool,
    /// Minimum therm_steps for guaranteed output; null outside the engine
    /// regime or when swapping is disabled.
    threshold_time: Option<f64>,
}

#[derive(Serialize)]
struct StageRow {
    stage: usize,
    half: &'static str,
    gap: f64,
    p_upper: f64,
    work: f64,
    t_eff: Option<f64>,
    entropy_bits: f64,
}

fn write_cycle_json(path: &PathBuf, report: &CycleReport) -> Result<()> {
    let rows: Vec<StageRow> = report
        .stages
        .iter()
        .map(|stage| StageRow {
            stage: stage.stage,
            half: stage.half.label(),
            gap: stage.gap,
            p_upper: stage.state.p_upper(),
            work: stage.work,
            t_eff: finite_or_none(stage.effective_temperature.as_f64()),
            entropy_bits: stage.entropy_bits,
        })
        .collect();
    write_json(path, &rows)
}

pub fn run(args: EngineArgs) -> Result<u8> {
    let file = FileConfig::load(args.config.as_deref())?;
    let config = EngineConfig::new(
        resolve(args.t_cold, &file, "t_cold", 1.0)?,
        resolve(args.t_hot, &file, "t_hot", 2.0)?,
        resolve(args.e_max, &file, "e_max", 4.0)?,
        resolve(args.num_steps, &file, "num_steps", 200)?,
        resolve(args.swap_prob, &file, "swap_prob", 0.5)?,
        resolve(args.therm_steps, &file, "therm_steps", 3)?,
    )?;
    let mode: CycleMode = resolve(args.mode, &file, "mode", CliCycleMode::LimitCycle)?.into();
    let output = match args.output {
        Some(dir) => dir,
        None => PathBuf::from(file.get_raw("output").unwrap_or("out")),
    };
    let format = resolve(args.format, &file, "format", Format::Csv)?;

    let report = run_cycle(&config, mode)?;
    let eff = efficiency_bounds(&config);
    let quasi_net = quasistatic_net_work(&config);
    let threshold_time = if quasi_net < 0.0 {
        finite_or_none(min_time_positive_output(&config)?)
    } else {
        None
    };

    let summary = Summary {
        config,
        mode,
        converged: report.converged,
        cycles_run: report.cycles_run,
        net_work: report.net_work,
        reset_work: report.reset_work,
        extraction_work: report.extraction_work,
        duration: report.duration,
        power: report.power,
        quasistatic_net_work: quasi_net,
        net_work_bound: net_work_bound(&config),
        power_bound: power_bound(&config).ok(),
        efficiency: EfficiencySummary {
            carnot: eff.eta_carnot,
            quasistatic: eff.eta_quasi,
            lower: eff.eta_lower,
            realized: (report.net_work < 0.0)
                .then(|| -report.net_work / (config.t_hot * std::f64::consts::LN_2)),
        },
        engine_regime: quasi_net < 0.0,
        threshold_time,
    };

    ensure_dir(&output)?;
    match format {
        Format::Csv => {
            let mut buffer = Vec::new();
            report.write_csv(&mut buffer)?;
            write_text(&output.join("cycle.csv"), &String::from_utf8(buffer)?)?;
        }
        Format::Json => write_cycle_json(&output.join("cycle.json"), &report)?,
    }
    write_json(&output.join("summary.json"), &summary)?;

    println!(
        "net work {} over {} time units ({}; {} cycles to steady state)",
        g17(report.net_work),
        report.duration,
        if report.net_work < 0.0 {
            "produced"
        } else {
            "consumed"
        },
        report.cycles_run,
    );
    println!("wrote {}", output.display());
    Ok(0)
}
