//! `landauer distribution`: exact and sampled work distributions for one
//! reset config, with the average, concentration, and single-shot bounds
//! tabulated next to their empirical counterparts.

use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use landauer::thermo::{
    evolve_protocol, reset_failure_bound, Direction, Occupation, ProtocolConfig,
};
use landauer::work_stats::{
    concentration_report, empirical_single_shot_work, exact_work_distribution, ks_distance,
    quasistatic_work, sample_trajectories, single_shot_work_bound, AverageWorkBounds,
    WorkDistribution, DP_MAX_STEPS,
};

use crate::config::{parse_eps_list, resolve, FileConfig};
use crate::output::{ensure_dir, finite_or_none, g17, write_json, write_text, Format};

/// Fractions of `e_max` at which the concentration bounds are tabulated.
const OMEGA_FRACTIONS: [f64; 8] = [0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5];

#[derive(clap::Args)]
pub struct DistributionArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Inverse bath temperature.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Energy increment per stage.
    #[arg(long)]
    pub step_energy: Option<f64>,
    /// Number of stages.
    #[arg(long)]
    pub num_steps: Option<usize>,
    /// Per-unit-time swap probability.
    #[arg(long)]
    pub swap_prob: Option<f64>,
    /// Thermalization steps per stage.
    #[arg(long)]
    pub therm_steps: Option<u32>,
    /// Monte Carlo sample count (0 = exact only).
    #[arg(long)]
    pub samples: Option<u64>,
    /// Seed for the trajectory sampler.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated failure probabilities for the single-shot table.
    #[arg(long)]
    pub eps: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Data file format (the summary is always JSON).
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Serialize)]
struct DistStats {
    mean: f64,
    variance: f64,
    std_dev: f64,
}

impl DistStats {
    fn of(dist: &WorkDistribution) -> Self {
        let variance = dist.variance();
        Self {
            mean: dist.mean(),
            variance,
            std_dev: variance.sqrt(),
        }
    }
}

#[derive(Serialize)]
struct SampledStats {
    n_samples: u64,
    seed: u64,
    mean: f64,
    variance: f64,
    ks_distance_to_exact: Option<f64>,
}

#[derive(Serialize)]
struct SingleShotRow {
    eps: f64,
    /// Analytic quantile bound; null when unbounded (no effective swapping).
    bound: Option<f64>,
    exact_quantile: Option<f64>,
    sampled_quantile: Option<f64>,
}

#[derive(Serialize)]
struct ConcentrationRow {
    omega: f64,
    bound_quasistatic: f64,
    bound_finite: f64,
    exact_tail: Option<f64>,
    sampled_tail: Option<f64>,
    sensitivity_unbounded: bool,
}

#[derive(Serialize)]
struct ResetFailure {
    bound: f64,
    final_upper_population: f64,
}

#[derive(Serialize)]
struct Summary {
    config: ProtocolConfig,
    e_max: f64,
    n_samples: u64,
    seed: Option<u64>,
    exact: Option<DistStats>,
    sampled: Option<SampledStats>,
    quasistatic_work: f64,
    average_work_bounds: AverageWorkBounds,
    reset_failure: ResetFailure,
    single_shot: Vec<SingleShotRow>,
    concentration: Vec<ConcentrationRow>,
}

fn write_distribution_csv(
    path: &PathBuf,
    exact: Option<&WorkDistribution>,
    sampled: Option<&WorkDistribution>,
) -> Result<()> {
    let reference = exact.or(sampled).expect("at least one distribution");
    let mut text = String::from("work_value");
    if exact.is_some() {
        text.push_str(",probability");
    }
    if sampled.is_some() {
        text.push_str(",sampled_probability");
    }
    text.push('\n');
    for k in 0..=reference.num_steps() {
        text.push_str(&g17(reference.value(k)));
        if let Some(dist) = exact {
            text.push(',');
            text.push_str(&g17(dist.probs()[k]));
        }
        if let Some(dist) = sampled {
            text.push(',');
            text.push_str(&g17(dist.probs()[k]));
        }
        text.push('\n');
    }
    write_text(path, &text)
}

#[derive(Serialize)]
struct DistributionJsonRow {
    work_value: f64,
    probability: Option<f64>,
    sampled_probability: Option<f64>,
}

pub fn run(args: DistributionArgs) -> Result<u8> {
    let file = FileConfig::load(args.config.as_deref())?;
    let config = ProtocolConfig::new(
        resolve(args.beta, &file, "beta", 1.0)?,
        resolve(args.step_energy, &file, "step_energy", 0.5)?,
        resolve(args.num_steps, &file, "num_steps", 8)?,
        resolve(args.swap_prob, &file, "swap_prob", 0.5)?,
        resolve(args.therm_steps, &file, "therm_steps", 2)?,
        Direction::Raise,
    )?;
    let samples = resolve(args.samples, &file, "samples", 0u64)?;
    let seed = resolve(args.seed, &file, "seed", 0u64)?;
    let eps_raw = match &args.eps {
        Some(list) => list.clone(),
        None => file.get_raw("eps").unwrap_or("0.1,0.01,0.001").to_string(),
    };
    let eps_list = parse_eps_list(&eps_raw)?;
    let output = match args.output {
        Some(dir) => dir,
        None => PathBuf::from(file.get_raw("output").unwrap_or("out")),
    };
    let format = resolve(args.format, &file, "format", Format::Csv)?;

    let exact = if config.num_steps <= DP_MAX_STEPS {
        Some(exact_work_distribution(&config)?)
    } else {
        eprintln!(
            "note: num_steps {} exceeds the exact-distribution cap {DP_MAX_STEPS}; \
             emitting sampled data only",
            config.num_steps
        );
        None
    };
    let sampled = if samples > 0 {
        Some(sample_trajectories(&config, samples, seed)?)
    } else {
        None
    };
    if exact.is_none() && sampled.is_none() {
        anyhow::bail!("nothing to emit: exact distribution capped and --samples is 0");
    }
    let sampled_dist = sampled.as_ref().map(|s| &s.distribution);

    let trace = evolve_protocol(&config, Occupation::maximally_mixed());
    let effective_swap = config.effective_swap();

    let single_shot = eps_list
        .iter()
        .map(|eps| SingleShotRow {
            eps: *eps,
            bound: finite_or_none(single_shot_work_bound(&config, *eps)),
            exact_quantile: exact.as_ref().map(|d| empirical_single_shot_work(d, *eps)),
            sampled_quantile: sampled_dist.map(|d| empirical_single_shot_work(d, *eps)),
        })
        .collect();

    let concentration = OMEGA_FRACTIONS
        .iter()
        .map(|fraction| {
            let omega = fraction * config.e_max();
            let reference = exact.as_ref().or(sampled_dist).unwrap();
            let report = concentration_report(&config, reference, omega);
            ConcentrationRow {
                omega,
                bound_quasistatic: report.bound_quasi,
                bound_finite: report.bound_finite,
                exact_tail: exact.as_ref().map(|d| d.two_sided_tail(omega)),
                sampled_tail: sampled_dist.map(|d| d.two_sided_tail(omega)),
                sensitivity_unbounded: effective_swap == 0.0,
            }
        })
        .collect();

    let summary = Summary {
        config,
        e_max: config.e_max(),
        n_samples: samples,
        seed: (samples > 0).then_some(seed),
        exact: exact.as_ref().map(DistStats::of),
        sampled: sampled.as_ref().map(|s| SampledStats {
            n_samples: s.n_samples,
            seed: s.seed,
            mean: s.distribution.mean(),
            variance: s.distribution.variance(),
            ks_distance_to_exact: exact.as_ref().map(|e| ks_distance(&s.distribution, e)),
        }),
        quasistatic_work: quasistatic_work(config.e_max(), config.beta),
        average_work_bounds: landauer::work_stats::average_work_bounds(&config),
        reset_failure: ResetFailure {
            bound: reset_failure_bound(&config),
            final_upper_population: trace.final_state().p_upper(),
        },
        single_shot,
        concentration,
    };

    ensure_dir(&output)?;
    match format {
        Format::Csv => write_distribution_csv(
            &output.join("distribution.csv"),
            exact.as_ref(),
            sampled_dist,
        )?,
        Format::Json => {
            let reference = exact.as_ref().or(sampled_dist).unwrap();
            let rows: Vec<DistributionJsonRow> = (0..=reference.num_steps())
                .map(|k| DistributionJsonRow {
                    work_value: reference.value(k),
                    probability: exact.as_ref().map(|d| d.probs()[k]),
                    sampled_probability: sampled_dist.map(|d| d.probs()[k]),
                })
                .collect();
            write_json(&output.join("distribution.json"), &rows)?;
        }
    }
    write_json(&output.join("summary.json"), &summary)?;

    if let Some(stats) = &summary.exact {
        println!(
            "exact: <W> = {:.6}, std = {:.6} (quasistatic {:.6}, worst-case {:.6})",
            stats.mean, stats.std_dev, summary.quasistatic_work, summary.average_work_bounds.upper
        );
    }
    if let Some(stats) = &summary.sampled {
        println!(
            "sampled: {} trajectories, seed {}, <W> = {:.6}",
            stats.n_samples, stats.seed, stats.mean
        );
    }
    println!("wrote {}", output.display());
    Ok(0)
}
