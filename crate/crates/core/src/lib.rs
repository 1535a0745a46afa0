//! Finite-time thermodynamics of two-level bit reset.
//!
//! A two-level system beside a heat bath is reset by raising the upper level
//! in discrete stages while thermalizing through a stochastic partial swap.
//! This crate provides the ensemble and single-shot pictures of that
//! protocol and everything needed to stress-test its analytic guarantees:
//!
//! - [`thermo`]: the partial-swap channel, deterministic ensemble evolution,
//!   and variational-distance bounds on thermalization quality.
//! - [`work_stats`]: the exact single-shot work distribution (dynamic
//!   program plus brute-force oracle), a seeded parallel Monte Carlo
//!   sampler, the running conditional-expectation sequence, and the
//!   concentration / single-shot work bounds.
//! - [`coherence`]: density-matrix analysis of the level shifts, the work
//!   penalty of coherent excitation, and the active correction unitary.
//! - [`engine`]: the two-bath reset/extraction cycle with net-work, power,
//!   speed-limit, and efficiency bounds.
//! - [`multibit`]: failure and work scaling for many independent bits.
//!
//! Units: k_B = 1 and ħ = 1 throughout.

pub mod coherence;
pub mod engine;
pub mod error;
pub mod fmt;
pub mod multibit;
pub mod thermo;
pub mod work_stats;

pub use error::{Error, Result};
pub use thermo::{Direction, Occupation, ProtocolConfig};
pub use work_stats::WorkDistribution;
