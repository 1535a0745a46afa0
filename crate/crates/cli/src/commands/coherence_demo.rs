//! `landauer coherence-demo`: sweep the basis rotation of a level quench and
//! tabulate the uncorrected (sudden) work against the actively corrected
//! cost, which stays at the incoherent value for every rotation.

use std::path::PathBuf;

use anyhow::Result;

use landauer::coherence::{
    coherent_average_work, corrected_quench_work, sudden_quench_work, DensityMatrix2, Hamiltonian2,
};

use crate::config::{resolve, FileConfig};
use crate::output::{ensure_dir, g17, write_text};

#[derive(clap::Args)]
pub struct CoherenceDemoArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lower-level population of the (incoherent) input state.
    #[arg(long)]
    pub p_lower: Option<f64>,
    /// Level splitting before the quench.
    #[arg(long)]
    pub gap_old: Option<f64>,
    /// Level splitting after the quench.
    #[arg(long)]
    pub gap_new: Option<f64>,
    /// Number of rotation steps between 0 and pi/2.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Optional output directory for coherence.csv.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: CoherenceDemoArgs) -> Result<u8> {
    let file = FileConfig::load(args.config.as_deref())?;
    let p_lower = resolve(args.p_lower, &file, "p_lower", 0.8)?;
    let gap_old = resolve(args.gap_old, &file, "gap_old", 1.0)?;
    let gap_new = resolve(args.gap_new, &file, "gap_new", 2.0)?;
    let steps = resolve(args.steps, &file, "steps", 12usize)?;
    anyhow::ensure!((0.0..=1.0).contains(&p_lower), "p_lower must lie in [0, 1]");
    anyhow::ensure!(steps >= 1, "steps must be at least 1");

    let h_old = Hamiltonian2::diagonal(0.0, gap_old);
    let state = DensityMatrix2::diagonal(p_lower, 1.0 - p_lower)?;

    let mut csv =
        String::from("theta,transition_prob,sudden_work,corrected_work,model_work,penalty\n");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}",
        "theta", "p(a->b')", "sudden", "corrected", "penalty"
    );
    for i in 0..=steps {
        let theta = i as f64 * std::f64::consts::FRAC_PI_2 / steps as f64;
        let h_new = Hamiltonian2::rotated(0.0, gap_new, theta);
        let sudden = sudden_quench_work(&state, &h_old, &h_new);
        let corrected = corrected_quench_work(&state, &h_old, &h_new)?.work;
        let transition = theta.sin().powi(2);
        let model = coherent_average_work(p_lower, 1.0 - p_lower, transition, gap_old, gap_new);
        let penalty = sudden - corrected;
        println!(
            "{theta:>8.4} {transition:>12.6} {sudden:>12.6} {corrected:>12.6} {penalty:>12.6}"
        );
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            g17(theta),
            g17(transition),
            g17(sudden),
            g17(corrected),
            g17(model),
            g17(penalty)
        ));
    }

    if let Some(output) = &args.output {
        ensure_dir(output)?;
        write_text(&output.join("coherence.csv"), &csv)?;
        println!("wrote {}", output.join("coherence.csv").display());
    }
    Ok(0)
}
