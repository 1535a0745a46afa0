//! Error type shared by all simulation modules.

use thiserror::Error;

/// Errors reported by configuration validation and the simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field violates its domain.
    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// A probability pair does not describe a two-level occupation.
    #[error("invalid occupation ({p_lower}, {p_upper}): entries must lie in [0,1] and sum to 1")]
    InvalidOccupation { p_lower: f64, p_upper: f64 },

    /// A probability vector does not describe a work distribution.
    #[error("invalid work distribution: {reason}")]
    InvalidDistribution { reason: String },

    /// The operation is only defined for the raising (reset) direction.
    #[error("{op} is only defined for the raising direction")]
    RaisingOnly { op: &'static str },

    /// The requested stage count exceeds the cap for the chosen algorithm.
    #[error("num_steps {requested} exceeds the {what} cap of {cap}")]
    StepCapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// Eigenbasis pairing is ambiguous for a (near-)degenerate spectrum.
    #[error(
        "degenerate spectrum: eigenvalue splitting {splitting:.3e} leaves the \
         eigenbasis pairing ambiguous"
    )]
    DegenerateSpectrum { splitting: f64 },

    /// Limit-cycle iteration did not reach a fixed point within the cap.
    #[error(
        "limit cycle did not converge within {iterations} cycles \
         (last start-of-cycle residual {residual:.3e})"
    )]
    LimitCycleNotConverged { iterations: u64, residual: f64 },

    /// The quasistatic cycle consumes work, so no finite thermalization time
    /// yields guaranteed positive output.
    #[error("no engine regime: quasistatic net work {net_work} is non-negative")]
    NoEngineRegime { net_work: f64 },

    /// A cycle with zero thermalization steps has zero duration.
    #[error("therm_steps must be at least 1 for a finite-duration cycle")]
    ZeroDuration,

    /// Distributions on different work lattices cannot be combined.
    #[error("work distributions use different step energies ({a} vs {b})")]
    StepEnergyMismatch { a: f64, b: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
