//! Cross-module consistency checks: the trajectory, ensemble, and sampled
//! pictures of the reset must agree, and the Monte Carlo layer must be
//! reproducible and statistically consistent with the exact law.

use landauer::multibit::multi_bit_work_distribution;
use landauer::thermo::{evolve_protocol, Direction, Occupation, ProtocolConfig};
use landauer::work_stats::{
    exact_work_distribution, ks_distance, sample_trajectories, WorkDistribution,
};

fn raise_config(
    step_energy: f64,
    num_steps: usize,
    swap_prob: f64,
    therm_steps: u32,
) -> ProtocolConfig {
    ProtocolConfig::new(
        1.0,
        step_energy,
        num_steps,
        swap_prob,
        therm_steps,
        Direction::Raise,
    )
    .unwrap()
}

#[test]
fn trajectory_and_ensemble_means_agree() {
    for (num_steps, swap_prob, therm_steps, step_energy) in [
        (10usize, 0.4, 2u32, 0.5),
        (100, 0.9, 1, 0.1),
        (1000, 0.3, 4, 0.1),
        (200, 1.0, 1, 1.0),
    ] {
        let config = raise_config(step_energy, num_steps, swap_prob, therm_steps);
        let dist = exact_work_distribution(&config).unwrap();
        let ensemble = evolve_protocol(&config, Occupation::maximally_mixed()).total_work();
        assert!(
            (dist.mean() - ensemble).abs() < 1e-10,
            "N={num_steps} p={swap_prob} t={therm_steps}"
        );
        assert!((dist.total_mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sampled_mean_converges_to_the_exact_mean() {
    let config = raise_config(0.5, 50, 0.4, 2);
    let exact = exact_work_distribution(&config).unwrap();
    let sampled = sample_trajectories(&config, 1_000_000, 20_240_817).unwrap();
    let sigma = (exact.variance() / 1_000_000.0).sqrt();
    let drift = (sampled.distribution.mean() - exact.mean()).abs();
    assert!(
        drift < 5.0 * sigma,
        "drift {drift:.3e} vs sigma {sigma:.3e}"
    );
}

#[test]
fn empirical_cdf_converges_in_kolmogorov_smirnov_distance() {
    let samples = 100_000u64;
    let budget = 5.0 * (std::f64::consts::LN_2 / samples as f64).sqrt();
    for (num_steps, swap_prob, therm_steps) in [(10usize, 0.5, 1u32), (40, 1.0, 1), (25, 0.2, 3)] {
        let config = raise_config(0.5, num_steps, swap_prob, therm_steps);
        let exact = exact_work_distribution(&config).unwrap();
        let sampled = sample_trajectories(&config, samples, 7).unwrap();
        let distance = ks_distance(&sampled.distribution, &exact);
        assert!(
            distance < budget,
            "KS {distance:.4e} over budget {budget:.4e} at N={num_steps}"
        );
    }
}

#[test]
fn sampling_merges_identically_for_any_worker_count() {
    let config = raise_config(0.5, 30, 0.6, 2);
    let baseline = sample_trajectories(&config, 50_000, 11).unwrap();
    for threads in [1usize, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let run = pool.install(|| sample_trajectories(&config, 50_000, 11).unwrap());
        assert_eq!(run.distribution.probs(), baseline.distribution.probs());
        assert_eq!(run.trajectories, baseline.trajectories);
    }
}

#[test]
fn independent_bits_convolve() {
    // The two-bit law must equal the convolution square of the one-bit law;
    // spot-check against a two-bit mean and variance identity as well.
    let config = raise_config(0.5, 8, 0.5, 2);
    let single = exact_work_distribution(&config).unwrap();
    let double = multi_bit_work_distribution(2, &single).unwrap();
    assert!((double.mean() - 2.0 * single.mean()).abs() < 1e-10);
    assert!((double.variance() - 2.0 * single.variance()).abs() < 1e-10);
    assert!((double.total_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn distribution_serializes_to_csv_with_17_digit_fidelity() {
    let config = raise_config(0.5, 6, 0.4, 2);
    let dist = exact_work_distribution(&config).unwrap();
    let mut buffer = Vec::new();
    dist.write_csv(&mut buffer).unwrap();
    let text = String::from_utf8(buffer).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "work_value,probability");
    for (k, line) in lines.enumerate() {
        let (value, prob) = line.split_once(',').unwrap();
        assert_eq!(value.parse::<f64>().unwrap(), dist.value(k));
        assert_eq!(prob.parse::<f64>().unwrap(), dist.probs()[k]);
    }
}

#[test]
fn rebuilding_a_distribution_from_parsed_parts_round_trips() {
    let config = raise_config(0.25, 12, 0.7, 1);
    let dist = exact_work_distribution(&config).unwrap();
    let rebuilt = WorkDistribution::new(dist.step_energy(), dist.probs().to_vec()).unwrap();
    assert_eq!(rebuilt, dist);
}
