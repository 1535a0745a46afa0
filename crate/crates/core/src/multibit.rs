//! Failure-probability and work-bound scaling for resetting several
//! independent bits: union bounds on the combined failure and the linear
//! scaling of the guaranteed work cost.

use serde::Serialize;

use crate::error::Result;
use crate::thermo::{variational_distance_bound, ProtocolConfig};
use crate::work_stats::{single_shot_work_bound, WorkDistribution};

/// Failure and work bounds for resetting `n_bits` independent bits.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MultiBitReport {
    pub n_bits: usize,
    /// Per-bit single-shot failure probability.
    pub per_bit_fail: f64,
    /// Exact probability that at least one bit exceeds its quantile,
    /// `1 - (1 - eps)^n`.
    pub combined_fail_exact: f64,
    /// Union bound `n eps`, clamped to 1.
    pub combined_fail_bound: f64,
    /// `n_bits` times the per-bit single-shot work bound.
    pub total_work_bound: f64,
}

/// Combined single-shot statement for `n_bits` independent resets: the total
/// work exceeds `n_bits * W_max^eps` with probability at most `n_bits * eps`.
pub fn multi_bit_bound(n_bits: usize, config: &ProtocolConfig, fail_prob: f64) -> MultiBitReport {
    assert!(n_bits >= 1, "n_bits must be at least 1");
    assert!(
        fail_prob.is_finite() && 0.0 < fail_prob && fail_prob < 1.0,
        "fail_prob must lie in (0, 1)"
    );
    let combined_fail_exact = -(n_bits as f64 * (-fail_prob).ln_1p()).exp_m1();
    MultiBitReport {
        n_bits,
        per_bit_fail: fail_prob,
        combined_fail_exact,
        combined_fail_bound: (n_bits as f64 * fail_prob).min(1.0),
        total_work_bound: n_bits as f64 * single_shot_work_bound(config, fail_prob),
    }
}

/// Worst-case extra average cost of resetting `n_bits` bits relative to the
/// quasistatic cost: every bit may lag the thermal state by the final-stage
/// variational distance across the whole excursion, costing up to
/// `n_bits * delta * e_max`.
pub fn average_multibit_excess(n_bits: usize, config: &ProtocolConfig) -> Result<f64> {
    assert!(n_bits >= 1, "n_bits must be at least 1");
    let delta = variational_distance_bound(config.num_steps, config)?;
    Ok(n_bits as f64 * delta * config.e_max())
}

/// Work distribution of the total cost of `n_bits` independent resets: the
/// n-fold convolution of the single-bit law.
pub fn multi_bit_work_distribution(
    n_bits: usize,
    single: &WorkDistribution,
) -> Result<WorkDistribution> {
    assert!(n_bits >= 1, "n_bits must be at least 1");
    let mut total = single.clone();
    for _ in 1..n_bits {
        total = total.convolve(single)?;
    }
    Ok(total)
}
