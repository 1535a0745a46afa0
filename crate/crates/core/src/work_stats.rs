//! Single-shot work statistics of the finite-time reset: the exact work
//! distribution, a brute-force oracle, a seeded Monte Carlo sampler, the
//! running conditional-expectation (Doob) sequence, and the concentration
//! and single-shot bounds.
//!
//! A single shot is a sequence of definite occupancies `X_1..X_N` of the
//! upper level, one per stage. Stage `n` pays `X_n * step_energy` at the
//! shift, after which the occupancy persists through the thermalization
//! period with probability `(1-p)^t` or is redrawn from the thermal
//! populations at the new gap. Total work is therefore supported on the
//! lattice `{0, E, 2E, ..., N E}` and is tracked as integer step counts.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::neumaier_sum;
use crate::thermo::{thermal_population, Direction, ProtocolConfig};

/// Largest stage count accepted by the brute-force enumerator (2^(N+1) paths).
pub const BRUTE_FORCE_MAX_STEPS: usize = 20;

/// Default stage-count cap for the exact dynamic program (O(N^2) table).
pub const DP_MAX_STEPS: usize = 20_000;

/// Number of example trajectories returned alongside a sampled distribution.
pub const EXAMPLE_TRAJECTORIES: u64 = 32;

/// Exact probability mass over the discrete work support `{0, E, ..., N E}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkDistribution {
    step_energy: f64,
    probs: Vec<f64>,
}

impl WorkDistribution {
    /// Builds a distribution from raw masses, validating non-negativity and
    /// normalization.
    pub fn new(step_energy: f64, probs: Vec<f64>) -> Result<Self> {
        if !(step_energy.is_finite() && step_energy > 0.0) {
            return Err(Error::InvalidDistribution {
                reason: format!("step_energy must be finite and positive, got {step_energy}"),
            });
        }
        if probs.is_empty() {
            return Err(Error::InvalidDistribution {
                reason: "empty support".to_string(),
            });
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < -1e-15) {
            return Err(Error::InvalidDistribution {
                reason: format!("negative or non-finite mass {bad}"),
            });
        }
        let total = neumaier_sum(probs.iter().copied());
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution {
                reason: format!("masses sum to {total}, expected 1"),
            });
        }
        Ok(Self { step_energy, probs })
    }

    pub(crate) fn from_parts(step_energy: f64, probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        Self { step_energy, probs }
    }

    pub fn step_energy(&self) -> f64 {
        self.step_energy
    }

    /// Mass at each support point; entry `k` is `P(W = k * step_energy)`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of protocol stages, i.e. the largest support count.
    pub fn num_steps(&self) -> usize {
        self.probs.len() - 1
    }

    /// Work value of support point `k`.
    pub fn value(&self, k: usize) -> f64 {
        k as f64 * self.step_energy
    }

    pub fn total_mass(&self) -> f64 {
        neumaier_sum(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        neumaier_sum(
            self.probs
                .iter()
                .enumerate()
                .map(|(k, p)| self.value(k) * p),
        )
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        neumaier_sum(self.probs.iter().enumerate().map(|(k, p)| {
            let d = self.value(k) - mean;
            d * d * p
        }))
        .max(0.0)
    }

    /// Strict upper tail `P(W > k * step_energy)`.
    pub fn upper_tail(&self, k: usize) -> f64 {
        if k + 1 >= self.probs.len() {
            return 0.0;
        }
        neumaier_sum(self.probs[k + 1..].iter().copied())
    }

    /// Two-sided tail around the mean, `P(|W - <W>| >= omega)`.
    pub fn two_sided_tail(&self, omega: f64) -> f64 {
        assert!(
            omega.is_finite() && omega >= 0.0,
            "omega must be non-negative"
        );
        let mean = self.mean();
        neumaier_sum(
            self.probs
                .iter()
                .enumerate()
                .filter(|(k, _)| (self.value(*k) - mean).abs() >= omega)
                .map(|(_, p)| *p),
        )
    }

    /// Smallest support count `k` with `P(W > k * step_energy) <= fail_prob`
    /// (left-continuous quantile on the discrete law).
    pub fn quantile_count(&self, fail_prob: f64) -> usize {
        assert!(
            fail_prob.is_finite() && 0.0 < fail_prob && fail_prob < 1.0,
            "fail_prob must lie in (0, 1)"
        );
        let mut k = self.probs.len() - 1;
        let mut tail = 0.0;
        while k > 0 {
            let extended = tail + self.probs[k];
            if extended > fail_prob {
                break;
            }
            tail = extended;
            k -= 1;
        }
        k
    }

    /// Cumulative distribution `P(W <= k * step_energy)`.
    pub fn cdf(&self, k: usize) -> f64 {
        neumaier_sum(self.probs[..=k.min(self.probs.len() - 1)].iter().copied())
    }

    /// Convolves two distributions on the same work lattice (total work of
    /// independent runs).
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.step_energy != other.step_energy {
            return Err(Error::StepEnergyMismatch {
                a: self.step_energy,
                b: other.step_energy,
            });
        }
        let mut probs = vec![0.0; self.probs.len() + other.probs.len() - 1];
        for (i, a) in self.probs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.probs.iter().enumerate() {
                probs[i + j] += a * b;
            }
        }
        Ok(Self::from_parts(self.step_energy, probs))
    }

    /// Writes the distribution as CSV with columns `work_value,probability`.
    pub fn write_csv<W: Write>(&self, writer: &mut W) -> std::io::Result<()> {
        writeln!(writer, "work_value,probability")?;
        for (k, p) in self.probs.iter().enumerate() {
            writeln!(
                writer,
                "{},{}",
                crate::fmt::g17(self.value(k)),
                crate::fmt::g17(*p)
            )?;
        }
        Ok(())
    }
}

/// Largest Kolmogorov-Smirnov distance between two distributions on the same
/// lattice.
pub fn ks_distance(a: &WorkDistribution, b: &WorkDistribution) -> f64 {
    assert_eq!(a.step_energy, b.step_energy, "mismatched step energies");
    assert_eq!(a.probs.len(), b.probs.len(), "mismatched supports");
    let mut cdf_a = 0.0;
    let mut cdf_b = 0.0;
    let mut worst: f64 = 0.0;
    for k in 0..a.probs.len() {
        cdf_a += a.probs[k];
        cdf_b += b.probs[k];
        worst = worst.max((cdf_a - cdf_b).abs());
    }
    worst
}

/// One single-shot history: the upper-level occupancy at every stage shift.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    occupancies: Vec<u8>,
    step_energy: f64,
}

impl Trajectory {
    pub fn new(occupancies: Vec<u8>, step_energy: f64) -> Self {
        debug_assert!(occupancies.iter().all(|x| *x <= 1));
        Self {
            occupancies,
            step_energy,
        }
    }

    /// Occupancy sequence `X_1..X_N`, each 0 (lower) or 1 (upper).
    pub fn occupancies(&self) -> &[u8] {
        &self.occupancies
    }

    /// Number of stages paid while the upper level was occupied.
    pub fn work_count(&self) -> usize {
        self.occupancies.iter().map(|x| *x as usize).sum()
    }

    /// Realized work, `step_energy` times the occupancy count.
    pub fn work(&self) -> f64 {
        self.work_count() as f64 * self.step_energy
    }
}

fn require_raising(config: &ProtocolConfig, op: &'static str) -> Result<()> {
    config.validate()?;
    if config.direction == Direction::Lower {
        return Err(Error::RaisingOnly { op });
    }
    Ok(())
}

/// Thermal upper populations at the post-shift gap of every stage.
fn stage_thermal_uppers(config: &ProtocolConfig) -> Vec<f64> {
    (1..=config.num_steps)
        .map(|stage| thermal_population(config.stage_gap(stage), config.beta).p_upper())
        .collect()
}

/// Probability that the occupancy after stage `stage`'s thermalization is the
/// upper level, given occupancy `x` at that stage's shift. This is the
/// one-stage Markov kernel of the trajectory picture.
pub fn transition_upper(config: &ProtocolConfig, stage: usize, x: u8) -> f64 {
    debug_assert!((1..=config.num_steps).contains(&stage));
    debug_assert!(x <= 1);
    let effective = config.effective_swap();
    let thermal = thermal_population(config.stage_gap(stage), config.beta).p_upper();
    (1.0 - effective) * x as f64 + effective * thermal
}

/// Exact work distribution of the reset via a dynamic program over
/// (stage, occupancy, accumulated step count). Exact to round-off.
pub fn exact_work_distribution(config: &ProtocolConfig) -> Result<WorkDistribution> {
    exact_work_distribution_with_cap(config, DP_MAX_STEPS)
}

/// [`exact_work_distribution`] with an explicit stage-count cap.
pub fn exact_work_distribution_with_cap(
    config: &ProtocolConfig,
    cap: usize,
) -> Result<WorkDistribution> {
    require_raising(config, "exact_work_distribution")?;
    let n = config.num_steps;
    if n > cap {
        return Err(Error::StepCapExceeded {
            what: "exact dynamic program",
            requested: n,
            cap,
        });
    }
    let effective = config.effective_swap();
    let persist = 1.0 - effective;
    let thermal = stage_thermal_uppers(config);

    // lower[k] / upper[k]: mass with occupancy 0 / 1 about to pay the next
    // shift, having paid k steps so far.
    let mut lower = vec![0.0; n + 1];
    let mut upper = vec![0.0; n + 1];
    lower[0] = 0.5;
    upper[0] = 0.5;
    let mut next_lower = vec![0.0; n + 1];
    let mut next_upper = vec![0.0; n + 1];

    for stage in 1..=n {
        next_lower[..=stage].fill(0.0);
        next_upper[..=stage].fill(0.0);
        let to_upper = effective * thermal[stage - 1];
        let to_lower = effective * (1.0 - thermal[stage - 1]);
        for k in 0..stage {
            let from_lower = lower[k];
            if from_lower > 0.0 {
                next_lower[k] += from_lower * (persist + to_lower);
                next_upper[k] += from_lower * to_upper;
            }
            let from_upper = upper[k];
            if from_upper > 0.0 {
                next_upper[k + 1] += from_upper * (persist + to_upper);
                next_lower[k + 1] += from_upper * to_lower;
            }
        }
        std::mem::swap(&mut lower, &mut next_lower);
        std::mem::swap(&mut upper, &mut next_upper);
    }

    let probs = lower
        .iter()
        .zip(&upper)
        .map(|(l, u)| l + u)
        .collect::<Vec<_>>();
    Ok(WorkDistribution::from_parts(config.step_energy, probs))
}

/// Ground-truth oracle: enumerates every occupancy history (initial coin plus
/// one post-thermalization outcome per stage) and accumulates exact path
/// probabilities. Exponential in `num_steps`; capped at
/// [`BRUTE_FORCE_MAX_STEPS`].
pub fn brute_force_work_distribution(config: &ProtocolConfig) -> Result<WorkDistribution> {
    require_raising(config, "brute_force_work_distribution")?;
    let n = config.num_steps;
    if n > BRUTE_FORCE_MAX_STEPS {
        return Err(Error::StepCapExceeded {
            what: "brute-force enumeration",
            requested: n,
            cap: BRUTE_FORCE_MAX_STEPS,
        });
    }
    let effective = config.effective_swap();
    let persist = 1.0 - effective;
    let thermal = stage_thermal_uppers(config);
    let mut mass = vec![0.0; n + 1];

    struct Enumerator<'a> {
        n: usize,
        persist: f64,
        effective: f64,
        thermal: &'a [f64],
        mass: &'a mut [f64],
    }

    impl Enumerator<'_> {
        // Branch on the occupancy after each stage's thermalization; the
        // final branch does not affect the paid work but is enumerated for
        // the exact path probabilities.
        fn descend(&mut self, stage: usize, occupancy: u8, paid: usize, probability: f64) {
            let paid = paid + occupancy as usize;
            let thermal_same = if occupancy == 1 {
                self.thermal[stage - 1]
            } else {
                1.0 - self.thermal[stage - 1]
            };
            let stay = self.persist + self.effective * thermal_same;
            let flip = self.effective * (1.0 - thermal_same);
            if stage == self.n {
                self.mass[paid] += probability * stay;
                self.mass[paid] += probability * flip;
            } else {
                self.descend(stage + 1, occupancy, paid, probability * stay);
                self.descend(stage + 1, 1 - occupancy, paid, probability * flip);
            }
        }
    }

    let mut enumerator = Enumerator {
        n,
        persist,
        effective,
        thermal: &thermal,
        mass: &mut mass,
    };
    enumerator.descend(1, 0, 0, 0.5);
    enumerator.descend(1, 1, 0, 0.5);
    Ok(WorkDistribution::from_parts(config.step_energy, mass))
}

/// Seeded single-shot sampler. Every trajectory draws from an independent
/// counter-indexed stream of one ChaCha generator, so results are identical
/// for any worker count or merge order.
pub struct TrajectorySampler {
    step_energy: f64,
    effective: f64,
    thermal: Vec<f64>,
}

impl TrajectorySampler {
    pub fn new(config: &ProtocolConfig) -> Result<Self> {
        require_raising(config, "TrajectorySampler")?;
        Ok(Self {
            step_energy: config.step_energy,
            effective: config.effective_swap(),
            thermal: stage_thermal_uppers(config),
        })
    }

    fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    }

    /// Samples the full occupancy history of trajectory `stream`.
    pub fn sample(&self, seed: u64, stream: u64) -> Trajectory {
        let n = self.thermal.len();
        let mut rng = Self::stream_rng(seed, stream);
        let mut occupancies = Vec::with_capacity(n);
        let mut x: u8 = u8::from(rng.random::<f64>() < 0.5);
        for stage in 1..=n {
            occupancies.push(x);
            if stage < n {
                let upper_prob =
                    (1.0 - self.effective) * x as f64 + self.effective * self.thermal[stage - 1];
                x = u8::from(rng.random::<f64>() < upper_prob);
            }
        }
        Trajectory::new(occupancies, self.step_energy)
    }

    /// Samples only the paid step count of trajectory `stream`.
    pub fn sample_work_count(&self, seed: u64, stream: u64) -> usize {
        let n = self.thermal.len();
        let mut rng = Self::stream_rng(seed, stream);
        let mut x: u8 = u8::from(rng.random::<f64>() < 0.5);
        let mut paid = 0usize;
        for stage in 1..=n {
            paid += x as usize;
            if stage < n {
                let upper_prob =
                    (1.0 - self.effective) * x as f64 + self.effective * self.thermal[stage - 1];
                x = u8::from(rng.random::<f64>() < upper_prob);
            }
        }
        paid
    }
}

/// A sampled work distribution plus the first few trajectories that fed it.
#[derive(Debug, Clone)]
pub struct SampledDistribution {
    pub distribution: WorkDistribution,
    /// The first [`EXAMPLE_TRAJECTORIES`] histories, by stream index.
    pub trajectories: Vec<Trajectory>,
    pub n_samples: u64,
    pub seed: u64,
}

/// Draws `n_samples` trajectories in parallel and bins their work counts.
/// Deterministic in `(config, n_samples, seed)`.
pub fn sample_trajectories(
    config: &ProtocolConfig,
    n_samples: u64,
    seed: u64,
) -> Result<SampledDistribution> {
    assert!(n_samples >= 1, "n_samples must be at least 1");
    let sampler = TrajectorySampler::new(config)?;
    let n = config.num_steps;
    let counts = (0..n_samples)
        .into_par_iter()
        .fold(
            || vec![0u64; n + 1],
            |mut acc, stream| {
                acc[sampler.sample_work_count(seed, stream)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let probs = counts
        .iter()
        .map(|c| *c as f64 / n_samples as f64)
        .collect::<Vec<_>>();
    let trajectories = (0..EXAMPLE_TRAJECTORIES.min(n_samples))
        .map(|stream| sampler.sample(seed, stream))
        .collect();
    Ok(SampledDistribution {
        distribution: WorkDistribution::from_parts(config.step_energy, probs),
        trajectories,
        n_samples,
        seed,
    })
}

/// Quasistatic (perfect-thermalization, continuum) work cost of raising the
/// upper level from degeneracy to `e_max`: `(1/beta) ln(2 / (1 + e^{-beta
/// e_max}))`.
pub fn quasistatic_work(e_max: f64, beta: f64) -> f64 {
    assert!(
        e_max.is_finite() && e_max >= 0.0,
        "e_max must be non-negative"
    );
    assert!(beta.is_finite() && beta > 0.0, "beta must be positive");
    (std::f64::consts::LN_2 - (-beta * e_max).exp().ln_1p()) / beta
}

/// Two-sided bracket on the expected reset work.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AverageWorkBounds {
    /// Quasistatic cost; the expected work never falls below it.
    pub lower: f64,
    /// Finite-time worst case: `lower + (1-p)^t (E_max/2 - lower)`.
    pub upper: f64,
}

/// Bracket on the expected work of a finite-time reset.
pub fn average_work_bounds(config: &ProtocolConfig) -> AverageWorkBounds {
    assert!(
        config.direction == Direction::Raise,
        "average_work_bounds requires the raising direction"
    );
    let lower = quasistatic_work(config.e_max(), config.beta);
    let upper = lower + config.persistence() * (config.e_max() / 2.0 - lower);
    AverageWorkBounds { lower, upper }
}

/// Worst-case shift of the running work estimate from flipping the occupancy
/// at stage `n`: `E (1 - (1-P_sw)^{N-n}) / P_sw`. Reported as infinite when
/// the effective swap probability vanishes, since a flipped occupancy then
/// propagates undamped.
pub fn martingale_increment_bound(config: &ProtocolConfig, stage: usize) -> f64 {
    assert!(
        (1..=config.num_steps).contains(&stage),
        "stage must lie in 1..=num_steps"
    );
    let effective = config.effective_swap();
    let remaining = (config.num_steps - stage) as i32;
    if remaining == 0 {
        return 0.0;
    }
    if effective == 0.0 {
        return f64::INFINITY;
    }
    config.step_energy * (1.0 - (1.0 - effective).powi(remaining)) / effective
}

/// Two-sided concentration bound on the work about its mean:
/// `min(1, 2 exp(-2 omega^2 P_sw^2 / (N E^2)))`. With perfect thermalization
/// (`P_sw = 1`) this is the independent-stage bound; with `P_sw = 0` it is
/// vacuous (returns 1).
pub fn mcdiarmid_bound(config: &ProtocolConfig, omega: f64) -> f64 {
    assert!(
        omega.is_finite() && omega >= 0.0,
        "omega must be non-negative"
    );
    let effective = config.effective_swap();
    let n = config.num_steps as f64;
    let e = config.step_energy;
    let exponent = -2.0 * omega * omega * effective * effective / (n * e * e);
    (2.0 * exponent.exp()).min(1.0)
}

/// A concentration bound evaluated against the exact tail at one deviation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcentrationReport {
    pub omega: f64,
    /// Perfect-thermalization bound at this deviation.
    pub bound_quasi: f64,
    /// Finite-time bound, inflated by the swap sensitivity.
    pub bound_finite: f64,
    /// `P(|W - <W>| >= omega)` from the supplied distribution.
    pub empirical_tail: f64,
    /// Set when the effective swap probability is zero and the finite-time
    /// bound is vacuous.
    pub sensitivity_unbounded: bool,
}

/// Evaluates both concentration bounds against a distribution's exact tail.
pub fn concentration_report(
    config: &ProtocolConfig,
    dist: &WorkDistribution,
    omega: f64,
) -> ConcentrationReport {
    let n = config.num_steps as f64;
    let e = config.step_energy;
    let bound_quasi = (2.0 * (-2.0 * omega * omega / (n * e * e)).exp()).min(1.0);
    ConcentrationReport {
        omega,
        bound_quasi,
        bound_finite: mcdiarmid_bound(config, omega),
        empirical_tail: dist.two_sided_tail(omega),
        sensitivity_unbounded: config.effective_swap() == 0.0,
    }
}

/// Running conditional expectation of the total work given the first `n`
/// occupancies of `trajectory`. Entry 0 is the unconditional mean and entry
/// `N` the realized work.
pub fn doob_sequence(config: &ProtocolConfig, trajectory: &Trajectory) -> Vec<f64> {
    assert!(
        config.direction == Direction::Raise,
        "doob_sequence requires the raising direction"
    );
    let n = config.num_steps;
    assert_eq!(
        trajectory.occupancies().len(),
        n,
        "trajectory length mismatch"
    );
    let effective = config.effective_swap();
    let thermal = stage_thermal_uppers(config);
    let e = config.step_energy;

    // Expected occupancies of stages `from+1..=N` given E[X_from] = `mean`.
    // Stage j's occupancy is reached through the thermalization of stage j-1.
    let future = |from: usize, mean: f64| -> f64 {
        let mut current = mean;
        let mut acc = 0.0;
        for stage in (from + 1)..=n {
            current = (1.0 - effective) * current + effective * thermal[stage - 2];
            acc += current;
        }
        acc
    };

    let mut sequence = Vec::with_capacity(n + 1);
    // Unconditional: the first occupancy is the initial fair coin.
    sequence.push(e * (0.5 + future(1, 0.5)));
    let mut paid = 0.0;
    for (index, occupancy) in trajectory.occupancies().iter().enumerate() {
        let stage = index + 1;
        paid += *occupancy as f64;
        sequence.push(e * (paid + future(stage, *occupancy as f64)));
    }
    sequence
}

fn single_shot_formula(config: &ProtocolConfig, fail_prob: f64) -> f64 {
    let persistence = config.persistence();
    let effective = 1.0 - persistence;
    let e_max = config.e_max();
    let quasi = quasistatic_work(e_max, config.beta);
    let spread = ((2.0 / fail_prob).ln() / (2.0 * config.num_steps as f64)).sqrt();
    effective * quasi + 0.5 * persistence * e_max + spread * e_max / effective
}

/// Analytic bound on the single-shot work quantile `W_max^eps`: the level
/// exceeded with probability at most `fail_prob` in any one run. Infinite
/// when the effective swap probability vanishes.
pub fn single_shot_work_bound(config: &ProtocolConfig, fail_prob: f64) -> f64 {
    assert!(
        fail_prob.is_finite() && 0.0 < fail_prob && fail_prob < 1.0,
        "fail_prob must lie in (0, 1)"
    );
    assert!(
        config.direction == Direction::Raise,
        "single_shot_work_bound requires the raising direction"
    );
    single_shot_formula(config, fail_prob)
}

/// Single-shot work quantile of a concrete distribution: the smallest support
/// point `w` with `P(W > w) <= fail_prob`.
pub fn empirical_single_shot_work(dist: &WorkDistribution, fail_prob: f64) -> f64 {
    dist.value(dist.quantile_count(fail_prob))
}
