//! Two-level protocol model: thermal populations, the partial-swap
//! thermalization channel, deterministic ensemble evolution, and the
//! variational-distance bounds that control thermalization quality.
//!
//! Units: k_B = 1 and ħ = 1 throughout, so temperatures are energies and
//! `beta` is an inverse energy. All operations here are pure functions of
//! their inputs and safe to call concurrently.

use serde::Serialize;

use crate::error::{Error, Result};

/// Whether the protocol raises the upper level away from degeneracy (bit
/// reset) or lowers it back down (work extraction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Raise,
    Lower,
}

/// Full specification of one raising or lowering protocol.
///
/// The upper level moves through `num_steps` stages of size `step_energy`;
/// after every shift the system undergoes `therm_steps` partial-swap steps
/// with per-step swap probability `swap_prob` against a bath at inverse
/// temperature `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolConfig {
    /// Inverse bath temperature (1/energy).
    pub beta: f64,
    /// Energy increment per stage (> 0).
    pub step_energy: f64,
    /// Number of stages (≥ 1).
    pub num_steps: usize,
    /// Per-unit-time probability of swapping with a fresh thermal state.
    pub swap_prob: f64,
    /// Thermalization steps spent at each stage.
    pub therm_steps: u32,
    pub direction: Direction,
}

impl ProtocolConfig {
    pub fn new(
        beta: f64,
        step_energy: f64,
        num_steps: usize,
        swap_prob: f64,
        therm_steps: u32,
        direction: Direction,
    ) -> Result<Self> {
        let config = Self {
            beta,
            step_energy,
            num_steps,
            swap_prob,
            therm_steps,
            direction,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail =
            |field: &'static str, reason: String| Err(Error::InvalidConfig { field, reason });
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return fail(
                "beta",
                format!("must be finite and positive, got {}", self.beta),
            );
        }
        if !(self.step_energy.is_finite() && self.step_energy > 0.0) {
            return fail(
                "step_energy",
                format!("must be finite and positive, got {}", self.step_energy),
            );
        }
        if self.num_steps < 1 {
            return fail("num_steps", "must be at least 1".to_string());
        }
        if !(self.swap_prob.is_finite() && (0.0..=1.0).contains(&self.swap_prob)) {
            return fail(
                "swap_prob",
                format!("must lie in [0, 1], got {}", self.swap_prob),
            );
        }
        if !(self.num_steps as f64 * self.step_energy).is_finite() {
            return fail("num_steps", "num_steps * step_energy overflows".to_string());
        }
        Ok(())
    }

    /// Total excursion of the upper level, `num_steps * step_energy`.
    pub fn e_max(&self) -> f64 {
        self.num_steps as f64 * self.step_energy
    }

    /// Net swap probability accumulated over one stage's thermalization.
    pub fn effective_swap(&self) -> f64 {
        effective_swap_prob(self.swap_prob, self.therm_steps)
    }

    /// Probability of never swapping during one stage, `(1-p)^t`.
    pub fn persistence(&self) -> f64 {
        (1.0 - self.swap_prob).powi(self.therm_steps as i32)
    }

    /// Level splitting in force after the shift of stage `stage` (1-based).
    pub fn stage_gap(&self, stage: usize) -> f64 {
        debug_assert!((1..=self.num_steps).contains(&stage));
        match self.direction {
            Direction::Raise => stage as f64 * self.step_energy,
            Direction::Lower => (self.num_steps - stage) as f64 * self.step_energy,
        }
    }
}

/// A two-level occupation probability pair.
///
/// The pair is kept normalized by construction: `p_lower` is always derived
/// as `1 - p_upper`, so the probabilities sum to one to within a single
/// rounding of the subtraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupation {
    p_lower: f64,
    p_upper: f64,
}

impl Occupation {
    /// Builds an occupation from both entries, rejecting pairs that are out
    /// of range or fail to sum to one within 1e-12.
    pub fn new(p_lower: f64, p_upper: f64) -> Result<Self> {
        let in_range = |p: f64| p.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&p);
        if !in_range(p_lower) || !in_range(p_upper) || (p_lower + p_upper - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidOccupation { p_lower, p_upper });
        }
        Ok(Self::from_upper(p_upper))
    }

    /// Builds an occupation from the upper-level population alone.
    pub fn from_upper(p_upper: f64) -> Self {
        debug_assert!(p_upper.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&p_upper));
        let p_upper = p_upper.clamp(0.0, 1.0);
        Self {
            p_lower: 1.0 - p_upper,
            p_upper,
        }
    }

    /// The uniformly random bit (1/2, 1/2).
    pub fn maximally_mixed() -> Self {
        Self::from_upper(0.5)
    }

    pub fn p_lower(&self) -> f64 {
        self.p_lower
    }

    pub fn p_upper(&self) -> f64 {
        self.p_upper
    }
}

/// Gibbs populations of a two-level system with splitting `gap` at inverse
/// temperature `beta`: `(1, e^{-beta gap}) / (1 + e^{-beta gap})`.
pub fn thermal_population(gap: f64, beta: f64) -> Occupation {
    assert!(
        gap.is_finite() && gap >= 0.0,
        "gap must be finite and non-negative"
    );
    assert!(
        beta.is_finite() && beta > 0.0,
        "beta must be finite and positive"
    );
    let boltzmann = (-beta * gap).exp();
    Occupation::from_upper(boltzmann / (1.0 + boltzmann))
}

/// Net probability `1 - (1-p)^t` that `t` partial-swap steps of strength `p`
/// replace the system with a thermal state at least once.
pub fn effective_swap_prob(p: f64, t: u32) -> f64 {
    assert!(
        p.is_finite() && (0.0..=1.0).contains(&p),
        "p must lie in [0, 1]"
    );
    1.0 - (1.0 - p).powi(t as i32)
}

/// One partial-swap step: with probability `p` the state is replaced by the
/// thermal state for the current gap, otherwise it is left alone.
pub fn partial_swap_step(state: Occupation, gap: f64, beta: f64, p: f64) -> Occupation {
    assert!(
        p.is_finite() && (0.0..=1.0).contains(&p),
        "p must lie in [0, 1]"
    );
    let thermal = thermal_population(gap, beta);
    Occupation::from_upper((1.0 - p) * state.p_upper() + p * thermal.p_upper())
}

/// Thermalization period of one stage: `therm_steps` partial-swap steps at a
/// fixed gap. Equivalent to a single swap with probability
/// [`effective_swap_prob`]`(p, t)`.
pub fn evolve_stage(state: Occupation, stage_gap: f64, config: &ProtocolConfig) -> Occupation {
    let mut state = state;
    for _ in 0..config.therm_steps {
        state = partial_swap_step(state, stage_gap, config.beta, config.swap_prob);
    }
    state
}

/// Ensemble state and expected work increment recorded after one stage.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageRecord {
    /// 1-based stage index.
    pub stage: usize,
    /// Level splitting in force after this stage's shift.
    pub gap: f64,
    /// Occupation after this stage's thermalization period.
    pub state: Occupation,
    /// Expected work paid at this stage's shift (negative when lowering).
    pub work: f64,
}

/// Full ensemble trace of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolTrace {
    pub initial: Occupation,
    pub stages: Vec<StageRecord>,
}

impl ProtocolTrace {
    /// Expected total work of the protocol, the sum of the stage increments.
    pub fn total_work(&self) -> f64 {
        crate::fmt::neumaier_sum(self.stages.iter().map(|s| s.work))
    }

    /// Occupation after the final stage's thermalization.
    pub fn final_state(&self) -> Occupation {
        self.stages.last().map(|s| s.state).unwrap_or(self.initial)
    }
}

/// Runs the deterministic ensemble protocol: at every stage the level is
/// shifted first (paying `p_upper * step_energy`, with sign set by the
/// direction) and the system then thermalizes at the new gap.
pub fn evolve_protocol(config: &ProtocolConfig, initial: Occupation) -> ProtocolTrace {
    debug_assert!(config.validate().is_ok());
    let sign = match config.direction {
        Direction::Raise => 1.0,
        Direction::Lower => -1.0,
    };
    let mut state = initial;
    let mut stages = Vec::with_capacity(config.num_steps);
    for stage in 1..=config.num_steps {
        let work = sign * state.p_upper() * config.step_energy;
        let gap = config.stage_gap(stage);
        state = evolve_stage(state, gap, config);
        stages.push(StageRecord {
            stage,
            gap,
            state,
            work,
        });
    }
    ProtocolTrace { initial, stages }
}

/// Upper bound on the variational distance between the ensemble state after
/// stage `stage` and the thermal state at that stage's gap:
/// `(1/(1+e^{-beta n E}) - 1/2) (1-p)^t`.
///
/// Only derived for monotone raising; lowering is rejected.
pub fn variational_distance_bound(stage: usize, config: &ProtocolConfig) -> Result<f64> {
    if config.direction == Direction::Lower {
        return Err(Error::RaisingOnly {
            op: "variational_distance_bound",
        });
    }
    assert!(
        (1..=config.num_steps).contains(&stage),
        "stage must lie in 1..=num_steps"
    );
    let gap = config.stage_gap(stage);
    let thermal_lower = thermal_population(gap, config.beta).p_lower();
    Ok((thermal_lower - 0.5) * config.persistence())
}

/// Measured and bounded variational distance at one stage of a reset.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VariationalDistanceReport {
    pub stage: usize,
    /// Distance of the evolved ensemble from the instantaneous thermal state.
    pub measured: f64,
    /// The analytic bound at the same stage.
    pub bound: f64,
}

/// Runs a reset from the maximally mixed bit and compares the measured
/// variational distance against [`variational_distance_bound`] stage by stage.
pub fn variational_distance_reports(
    config: &ProtocolConfig,
) -> Result<Vec<VariationalDistanceReport>> {
    if config.direction == Direction::Lower {
        return Err(Error::RaisingOnly {
            op: "variational_distance_reports",
        });
    }
    let trace = evolve_protocol(config, Occupation::maximally_mixed());
    trace
        .stages
        .iter()
        .map(|record| {
            let thermal = thermal_population(record.gap, config.beta);
            Ok(VariationalDistanceReport {
                stage: record.stage,
                measured: (record.state.p_upper() - thermal.p_upper()).abs(),
                bound: variational_distance_bound(record.stage, config)?,
            })
        })
        .collect()
}

/// Upper bound on the final upper-level population of a reset:
/// `sigma (1 - (1-p)^t) + (1/2) (1-p)^t` with `sigma` the thermal upper
/// population at the full splitting. At `t = 0` this is exactly 1/2.
pub fn reset_failure_bound(config: &ProtocolConfig) -> f64 {
    assert!(
        config.direction == Direction::Raise,
        "reset_failure_bound requires the raising direction"
    );
    let persistence = config.persistence();
    let sigma = thermal_population(config.e_max(), config.beta).p_upper();
    sigma * (1.0 - persistence) + 0.5 * persistence
}
