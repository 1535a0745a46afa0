//! Two-bath engine cycle: a reset half against the cold bath followed by an
//! extraction half against the hot bath, with the net-work, power,
//! speed-limit, and efficiency bounds of the finite-time analysis.
//!
//! Sign convention: work consumed by the system is positive, so the engine
//! produces when `net_work < 0`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::thermo::{evolve_protocol, Direction, Occupation, ProtocolConfig, ProtocolTrace};
use crate::work_stats::quasistatic_work;

const LIMIT_CYCLE_TOL: f64 = 1e-12;
const LIMIT_CYCLE_CAP: u64 = 1_000_000;

/// Configuration of one reset/extraction engine cycle. Each half sweeps the
/// upper level across `e_max` in `num_steps` stages with `therm_steps`
/// partial-swap steps per stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig {
    /// Cold bath temperature (reset half).
    pub t_cold: f64,
    /// Hot bath temperature (extraction half).
    pub t_hot: f64,
    /// Maximum level splitting reached mid-cycle.
    pub e_max: f64,
    /// Stages per half-cycle.
    pub num_steps: usize,
    /// Per-unit-time swap probability with the active bath.
    pub swap_prob: f64,
    /// Thermalization steps per stage.
    pub therm_steps: u32,
}

impl EngineConfig {
    pub fn new(
        t_cold: f64,
        t_hot: f64,
        e_max: f64,
        num_steps: usize,
        swap_prob: f64,
        therm_steps: u32,
    ) -> Result<Self> {
        let config = Self {
            t_cold,
            t_hot,
            e_max,
            num_steps,
            swap_prob,
            therm_steps,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail =
            |field: &'static str, reason: String| Err(Error::InvalidConfig { field, reason });
        if !(self.t_cold.is_finite() && self.t_cold > 0.0) {
            return fail(
                "t_cold",
                format!("must be finite and positive, got {}", self.t_cold),
            );
        }
        if !(self.t_hot.is_finite() && self.t_hot >= self.t_cold) {
            return fail(
                "t_hot",
                format!("must be finite and at least t_cold, got {}", self.t_hot),
            );
        }
        if !(self.e_max.is_finite() && self.e_max > 0.0) {
            return fail(
                "e_max",
                format!("must be finite and positive, got {}", self.e_max),
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
        Ok(())
    }

    /// Energy step per stage, `e_max / num_steps`.
    pub fn step_energy(&self) -> f64 {
        self.e_max / self.num_steps as f64
    }

    /// Net swap probability accumulated over one stage.
    pub fn effective_swap(&self) -> f64 {
        crate::thermo::effective_swap_prob(self.swap_prob, self.therm_steps)
    }

    /// The reset half as a raising protocol against the cold bath.
    pub fn reset_half(&self) -> ProtocolConfig {
        ProtocolConfig {
            beta: 1.0 / self.t_cold,
            step_energy: self.step_energy(),
            num_steps: self.num_steps,
            swap_prob: self.swap_prob,
            therm_steps: self.therm_steps,
            direction: Direction::Raise,
        }
    }

    /// The extraction half as a lowering protocol against the hot bath.
    pub fn extraction_half(&self) -> ProtocolConfig {
        ProtocolConfig {
            beta: 1.0 / self.t_hot,
            step_energy: self.step_energy(),
            num_steps: self.num_steps,
            swap_prob: self.swap_prob,
            therm_steps: self.therm_steps,
            direction: Direction::Lower,
        }
    }
}

/// Which half of the cycle a stage belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Reset,
    Extract,
}

impl Half {
    pub fn label(&self) -> &'static str {
        match self {
            Half::Reset => "reset",
            Half::Extract => "extract",
        }
    }
}

/// Temperature whose Gibbs state matches a given occupation at the current
/// gap. Equal populations match every temperature only in the infinite
/// limit; an empty upper level is the zero-temperature ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveTemperature {
    /// Finite matching temperature; negative for inverted populations.
    Finite(f64),
    /// Equal populations.
    Infinite,
    /// Upper level unoccupied.
    GroundState,
}

impl EffectiveTemperature {
    /// Numeric rendering: infinity for the infinite flag, 0 for the ground
    /// state.
    pub fn as_f64(&self) -> f64 {
        match self {
            EffectiveTemperature::Finite(t) => *t,
            EffectiveTemperature::Infinite => f64::INFINITY,
            EffectiveTemperature::GroundState => 0.0,
        }
    }
}

/// Gibbs-matching temperature of `state` at level splitting `gap`:
/// `gap / ln(p_lower / p_upper)`.
pub fn effective_temperature(state: Occupation, gap: f64) -> EffectiveTemperature {
    assert!(
        gap.is_finite() && gap >= 0.0,
        "gap must be finite and non-negative"
    );
    if state.p_upper() == 0.0 {
        return EffectiveTemperature::GroundState;
    }
    let log_ratio = (state.p_lower() / state.p_upper()).ln();
    if log_ratio == 0.0 {
        return EffectiveTemperature::Infinite;
    }
    EffectiveTemperature::Finite(gap / log_ratio)
}

/// Shannon entropy of the occupation in bits, with `0 log 0 = 0`.
pub fn state_entropy(state: Occupation) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(state.p_lower()) + term(state.p_upper())
}

/// One stage of the cycle trace, recorded after the stage's thermalization.
#[derive(Debug, Clone, Copy)]
pub struct CycleStage {
    pub half: Half,
    /// 1-based stage index within its half.
    pub stage: usize,
    /// Level splitting in force during this stage's thermalization.
    pub gap: f64,
    pub state: Occupation,
    /// Work paid at this stage's level shift (negative when extracting).
    pub work: f64,
    pub effective_temperature: EffectiveTemperature,
    pub entropy_bits: f64,
}

/// Full trace and aggregates of one engine cycle.
#[derive(Debug, Clone)]
pub struct CycleReport {
    pub stages: Vec<CycleStage>,
    /// Work consumed over the full cycle (negative = produced).
    pub net_work: f64,
    /// Work consumed by the reset half.
    pub reset_work: f64,
    /// Work consumed by the extraction half (normally negative).
    pub extraction_work: f64,
    /// Thermalization steps spent over the cycle, `2 num_steps therm_steps`.
    pub duration: u64,
    /// `net_work / duration`; absent for zero-duration (t = 0) cycles.
    pub power: Option<f64>,
    /// Whether the trace describes a converged limit cycle.
    pub converged: bool,
    /// Cycles iterated before convergence (1 for first-cycle mode).
    pub cycles_run: u64,
}

impl CycleReport {
    /// Writes the per-stage trace as CSV with columns
    /// `stage,half,gap,p_upper,work,t_eff,entropy_bits`.
    pub fn write_csv<W: Write>(&self, writer: &mut W) -> std::io::Result<()> {
        writeln!(writer, "stage,half,gap,p_upper,work,t_eff,entropy_bits")?;
        for stage in &self.stages {
            writeln!(
                writer,
                "{},{},{},{},{},{},{}",
                stage.stage,
                stage.half.label(),
                g17(stage.gap),
                g17(stage.state.p_upper()),
                g17(stage.work),
                g17(stage.effective_temperature.as_f64()),
                g17(stage.entropy_bits),
            )?;
        }
        Ok(())
    }
}

/// Which cycle of the engine to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleMode {
    /// The very first cycle, started from the maximally mixed bit.
    FirstCycle,
    /// The steady cycle reached by iterating until the start-of-cycle
    /// occupation stops changing.
    LimitCycle,
}

/// Start-of-next-cycle upper population after one full cycle from `upper`.
fn cycle_end_upper(config: &EngineConfig, upper: f64) -> f64 {
    let mut state = Occupation::from_upper(upper);
    let reset = config.reset_half();
    let extract = config.extraction_half();
    for stage in 1..=config.num_steps {
        state = crate::thermo::evolve_stage(state, reset.stage_gap(stage), &reset);
    }
    for stage in 1..=config.num_steps {
        state = crate::thermo::evolve_stage(state, extract.stage_gap(stage), &extract);
    }
    state.p_upper()
}

fn converge_limit_cycle(config: &EngineConfig) -> Result<(Occupation, u64)> {
    let mut upper = 0.5;
    for iteration in 1..=LIMIT_CYCLE_CAP {
        let next = cycle_end_upper(config, upper);
        if (next - upper).abs() < LIMIT_CYCLE_TOL {
            return Ok((Occupation::from_upper(next), iteration));
        }
        upper = next;
    }
    Err(Error::LimitCycleNotConverged {
        iterations: LIMIT_CYCLE_CAP,
        residual: (cycle_end_upper(config, upper) - upper).abs(),
    })
}

fn trace_half(trace: &ProtocolTrace, half: Half, stages: &mut Vec<CycleStage>) {
    for record in &trace.stages {
        stages.push(CycleStage {
            half,
            stage: record.stage,
            gap: record.gap,
            state: record.state,
            work: record.work,
            effective_temperature: effective_temperature(record.state, record.gap),
            entropy_bits: state_entropy(record.state),
        });
    }
}

/// Runs one engine cycle: `num_steps` raise-then-thermalize stages against
/// the cold bath from zero gap, then `num_steps` lower-then-thermalize stages
/// against the hot bath from `e_max`. Bath switches are instantaneous and
/// free. In limit-cycle mode the cycle map is iterated (cap 10^6) until the
/// start-of-cycle occupation is stationary to 1e-12.
pub fn run_cycle(config: &EngineConfig, mode: CycleMode) -> Result<CycleReport> {
    config.validate()?;
    let (start, cycles_run, converged) = match mode {
        CycleMode::FirstCycle => (Occupation::maximally_mixed(), 1, false),
        CycleMode::LimitCycle => {
            let (state, iterations) = converge_limit_cycle(config)?;
            (state, iterations, true)
        }
    };

    let reset_trace = evolve_protocol(&config.reset_half(), start);
    let extract_trace = evolve_protocol(&config.extraction_half(), reset_trace.final_state());

    let mut stages = Vec::with_capacity(2 * config.num_steps);
    trace_half(&reset_trace, Half::Reset, &mut stages);
    trace_half(&extract_trace, Half::Extract, &mut stages);

    let reset_work = reset_trace.total_work();
    let extraction_work = extract_trace.total_work();
    let net_work = reset_work + extraction_work;
    let duration = 2 * config.num_steps as u64 * config.therm_steps as u64;
    let power = (duration > 0).then(|| net_work / duration as f64);

    Ok(CycleReport {
        stages,
        net_work,
        reset_work,
        extraction_work,
        duration,
        power,
        converged,
        cycles_run,
    })
}

/// Quasistatic net work consumed per cycle: the quasistatic reset cost at the
/// cold temperature minus the quasistatic extraction yield at the hot one.
/// Negative in the engine regime.
pub fn quasistatic_net_work(config: &EngineConfig) -> f64 {
    quasistatic_work(config.e_max, 1.0 / config.t_cold)
        - quasistatic_work(config.e_max, 1.0 / config.t_hot)
}

/// Upper bound on the net work consumed per limit cycle:
/// `P_sw * W_quasi_net + (1 - P_sw) * e_max`.
pub fn net_work_bound(config: &EngineConfig) -> f64 {
    let effective = config.effective_swap();
    effective * quasistatic_net_work(config) + (1.0 - effective) * config.e_max
}

/// Upper bound on the cycle power, the net-work bound divided by the cycle
/// duration `2 (e_max / step_energy) therm_steps`.
pub fn power_bound(config: &EngineConfig) -> Result<f64> {
    if config.therm_steps == 0 {
        return Err(Error::ZeroDuration);
    }
    let duration = 2.0 * config.num_steps as f64 * config.therm_steps as f64;
    Ok(net_work_bound(config) / duration)
}

/// Minimum thermalization time per stage for guaranteed net output:
/// `(-1/ln(1-p)) ln(1 - e_max / W_quasi_net)`. The net-work bound is
/// non-negative for `therm_steps` below this threshold and negative above it.
pub fn min_time_positive_output(config: &EngineConfig) -> Result<f64> {
    let quasi_net = quasistatic_net_work(config);
    if quasi_net >= 0.0 {
        return Err(Error::NoEngineRegime {
            net_work: quasi_net,
        });
    }
    if config.swap_prob == 0.0 {
        return Ok(f64::INFINITY);
    }
    if config.swap_prob == 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 - config.e_max / quasi_net).ln() / -(1.0 - config.swap_prob).ln())
}

/// Efficiency bracket of the cycle, with the quasistatic efficiency related
/// to Carnot through the finite-splitting partition functions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EfficiencyBounds {
    /// `eta_quasi - (1-p)^t e_max / (t_hot ln 2)`.
    pub eta_lower: f64,
    /// Equals the quasistatic efficiency.
    pub eta_upper: f64,
    pub eta_quasi: f64,
    /// `1 - t_cold / t_hot`.
    pub eta_carnot: f64,
}

/// Efficiency bracket of a finite-time cycle (net extracted work per
/// `t_hot ln 2`).
pub fn efficiency_bounds(config: &EngineConfig) -> EfficiencyBounds {
    let ln2 = std::f64::consts::LN_2;
    let ln_z_cold = (-config.e_max / config.t_cold).exp().ln_1p();
    let ln_z_hot = (-config.e_max / config.t_hot).exp().ln_1p();
    let eta_carnot = 1.0 - config.t_cold / config.t_hot;
    let eta_quasi = eta_carnot - (ln_z_hot - (config.t_cold / config.t_hot) * ln_z_cold) / ln2;
    let persistence = (1.0 - config.swap_prob).powi(config.therm_steps as i32);
    EfficiencyBounds {
        eta_lower: eta_quasi - persistence * config.e_max / (config.t_hot * ln2),
        eta_upper: eta_quasi,
        eta_quasi,
        eta_carnot,
    }
}
