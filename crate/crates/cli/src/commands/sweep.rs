//! `landauer sweep`: evaluate the engine or the reset over a grid of one
//! parameter and tabulate simulated values next to their bounds. Rows are
//! computed in parallel and emitted in input order.

use std::path::PathBuf;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;

use landauer::engine::{
    efficiency_bounds, min_time_positive_output, net_work_bound, power_bound, quasistatic_net_work,
    run_cycle, CycleMode, EngineConfig,
};
use landauer::multibit::{average_multibit_excess, multi_bit_bound};
use landauer::thermo::{Direction, ProtocolConfig};
use landauer::work_stats::{
    exact_work_distribution, quasistatic_work, single_shot_work_bound, DP_MAX_STEPS,
};

use crate::config::{resolve, FileConfig};
use crate::output::{ensure_dir, finite_or_none, g17, write_json, write_text, Format};

#[derive(clap::Args)]
pub struct SweepArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// What to sweep.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Which parameter to vary.
    #[arg(long, value_enum)]
    pub param: Option<Param>,
    /// Values: a comma list (`1,3,10`) or an inclusive integer range (`1:20`).
    #[arg(long)]
    pub values: Option<String>,
    /// Number of independent bits for the reset sweep's combined bounds.
    #[arg(long)]
    pub n_bits: Option<usize>,
    /// Per-bit failure probability for the reset sweep.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Engine base config.
    #[arg(long)]
    pub t_cold: Option<f64>,
    #[arg(long)]
    pub t_hot: Option<f64>,
    #[arg(long)]
    pub e_max: Option<f64>,
    /// Reset base config.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub step_energy: Option<f64>,
    /// Shared base config.
    #[arg(long)]
    pub num_steps: Option<usize>,
    #[arg(long)]
    pub swap_prob: Option<f64>,
    #[arg(long)]
    pub therm_steps: Option<u32>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Engine,
    Reset,
}

impl std::str::FromStr for Kind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "engine" => Ok(Self::Engine),
            "reset" => Ok(Self::Reset),
            other => bail!("kind must be engine or reset, got `{other}`"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Param {
    ThermSteps,
    SwapProb,
}

impl std::str::FromStr for Param {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "therm-steps" | "therm_steps" => Ok(Self::ThermSteps),
            "swap-prob" | "swap_prob" => Ok(Self::SwapProb),
            other => bail!("param must be therm-steps or swap-prob, got `{other}`"),
        }
    }
}

fn parse_values(raw: &str) -> Result<Vec<f64>> {
    if let Some((start, end)) = raw.split_once(':') {
        let start: i64 = start.trim().parse()?;
        let end: i64 = end.trim().parse()?;
        if end < start {
            bail!("range `{raw}` is empty");
        }
        return Ok((start..=end).map(|v| v as f64).collect());
    }
    raw.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|e| anyhow::anyhow!("value `{item}`: {e}"))
        })
        .collect()
}

#[derive(Serialize)]
struct EngineRow {
    param: &'static str,
    value: f64,
    net_work: f64,
    power: Option<f64>,
    net_work_bound: f64,
    power_bound: Option<f64>,
    eta_lower: f64,
    eta_quasi: f64,
    realized_efficiency: Option<f64>,
    threshold_time: Option<f64>,
}

#[derive(Serialize)]
struct ResetRow {
    param: &'static str,
    value: f64,
    mean_work: Option<f64>,
    quasistatic_work: f64,
    average_upper_bound: f64,
    single_shot_bound: Option<f64>,
    n_bits: usize,
    combined_fail_exact: f64,
    combined_fail_bound: f64,
    total_work_bound: Option<f64>,
    average_excess_bound: f64,
}

fn apply_param_engine(base: &EngineConfig, param: Param, value: f64) -> Result<EngineConfig> {
    let mut config = *base;
    match param {
        Param::ThermSteps => config.therm_steps = value as u32,
        Param::SwapProb => config.swap_prob = value,
    }
    config.validate()?;
    Ok(config)
}

fn apply_param_reset(base: &ProtocolConfig, param: Param, value: f64) -> Result<ProtocolConfig> {
    let mut config = *base;
    match param {
        Param::ThermSteps => config.therm_steps = value as u32,
        Param::SwapProb => config.swap_prob = value,
    }
    config.validate()?;
    Ok(config)
}

fn param_name(param: Param) -> &'static str {
    match param {
        Param::ThermSteps => "therm_steps",
        Param::SwapProb => "swap_prob",
    }
}

fn engine_csv(rows: &[EngineRow]) -> String {
    let mut text = String::from(
        "param,value,net_work,power,net_work_bound,power_bound,eta_lower,eta_quasi,\
         realized_efficiency,threshold_time\n",
    );
    let opt = |v: Option<f64>| v.map(g17).unwrap_or_default();
    for row in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.param,
            g17(row.value),
            g17(row.net_work),
            opt(row.power),
            g17(row.net_work_bound),
            opt(row.power_bound),
            g17(row.eta_lower),
            g17(row.eta_quasi),
            opt(row.realized_efficiency),
            opt(row.threshold_time),
        ));
    }
    text
}

fn reset_csv(rows: &[ResetRow]) -> String {
    let mut text = String::from(
        "param,value,mean_work,quasistatic_work,average_upper_bound,single_shot_bound,\
         n_bits,combined_fail_exact,combined_fail_bound,total_work_bound,average_excess_bound\n",
    );
    let opt = |v: Option<f64>| v.map(g17).unwrap_or_default();
    for row in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.param,
            g17(row.value),
            opt(row.mean_work),
            g17(row.quasistatic_work),
            g17(row.average_upper_bound),
            opt(row.single_shot_bound),
            row.n_bits,
            g17(row.combined_fail_exact),
            g17(row.combined_fail_bound),
            opt(row.total_work_bound),
            g17(row.average_excess_bound),
        ));
    }
    text
}

pub fn run(args: SweepArgs) -> Result<u8> {
    let file = FileConfig::load(args.config.as_deref())?;
    let kind = resolve(args.kind, &file, "kind", Kind::Engine)?;
    let param = resolve(args.param, &file, "param", Param::ThermSteps)?;
    let values_raw = match &args.values {
        Some(raw) => raw.clone(),
        None => file.get_raw("values").unwrap_or("1:10").to_string(),
    };
    let values = parse_values(&values_raw)?;
    let output = match args.output {
        Some(dir) => dir,
        None => PathBuf::from(file.get_raw("output").unwrap_or("out")),
    };
    let format = resolve(args.format, &file, "format", Format::Csv)?;
    let name = param_name(param);
    ensure_dir(&output)?;

    match kind {
        Kind::Engine => {
            let base = EngineConfig::new(
                resolve(args.t_cold, &file, "t_cold", 1.0)?,
                resolve(args.t_hot, &file, "t_hot", 2.0)?,
                resolve(args.e_max, &file, "e_max", 4.0)?,
                resolve(args.num_steps, &file, "num_steps", 200)?,
                resolve(args.swap_prob, &file, "swap_prob", 0.5)?,
                resolve(args.therm_steps, &file, "therm_steps", 3)?,
            )?;
            let rows = values
                .par_iter()
                .map(|value| -> Result<EngineRow> {
                    let config = apply_param_engine(&base, param, *value)?;
                    let cycle = run_cycle(&config, CycleMode::LimitCycle)?;
                    let eff = efficiency_bounds(&config);
                    let engine_regime = quasistatic_net_work(&config) < 0.0;
                    Ok(EngineRow {
                        param: name,
                        value: *value,
                        net_work: cycle.net_work,
                        power: cycle.power,
                        net_work_bound: net_work_bound(&config),
                        power_bound: power_bound(&config).ok(),
                        eta_lower: eff.eta_lower,
                        eta_quasi: eff.eta_quasi,
                        realized_efficiency: (cycle.net_work < 0.0)
                            .then(|| -cycle.net_work / (config.t_hot * std::f64::consts::LN_2)),
                        threshold_time: if engine_regime {
                            finite_or_none(min_time_positive_output(&config)?)
                        } else {
                            None
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Csv => write_text(&output.join("sweep.csv"), &engine_csv(&rows))?,
                Format::Json => write_json(&output.join("sweep.json"), &rows)?,
            }
            println!("engine sweep over {name}: {} rows", rows.len());
        }
        Kind::Reset => {
            let base = ProtocolConfig::new(
                resolve(args.beta, &file, "beta", 1.0)?,
                resolve(args.step_energy, &file, "step_energy", 0.5)?,
                resolve(args.num_steps, &file, "num_steps", 8)?,
                resolve(args.swap_prob, &file, "swap_prob", 0.5)?,
                resolve(args.therm_steps, &file, "therm_steps", 2)?,
                Direction::Raise,
            )?;
            let n_bits = resolve(args.n_bits, &file, "n_bits", 1usize)?;
            let eps = resolve(args.eps, &file, "eps", 0.01)?;
            anyhow::ensure!(n_bits >= 1, "n_bits must be at least 1");
            anyhow::ensure!(0.0 < eps && eps < 1.0, "eps must lie in (0, 1)");
            let rows = values
                .par_iter()
                .map(|value| -> Result<ResetRow> {
                    let config = apply_param_reset(&base, param, *value)?;
                    let mean_work = (config.num_steps <= DP_MAX_STEPS)
                        .then(|| exact_work_distribution(&config).map(|d| d.mean()))
                        .transpose()?;
                    let bounds = landauer::work_stats::average_work_bounds(&config);
                    let report = multi_bit_bound(n_bits, &config, eps);
                    Ok(ResetRow {
                        param: name,
                        value: *value,
                        mean_work,
                        quasistatic_work: quasistatic_work(config.e_max(), config.beta),
                        average_upper_bound: bounds.upper,
                        single_shot_bound: finite_or_none(single_shot_work_bound(&config, eps)),
                        n_bits,
                        combined_fail_exact: report.combined_fail_exact,
                        combined_fail_bound: report.combined_fail_bound,
                        total_work_bound: finite_or_none(report.total_work_bound),
                        average_excess_bound: average_multibit_excess(n_bits, &config)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Csv => write_text(&output.join("sweep.csv"), &reset_csv(&rows))?,
                Format::Json => write_json(&output.join("sweep.json"), &rows)?,
            }
            println!("reset sweep over {name}: {} rows", rows.len());
        }
    }
    println!("wrote {}", output.display());
    Ok(0)
}
