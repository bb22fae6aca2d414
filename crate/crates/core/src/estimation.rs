//! Estimating the teacher's mistake count and living with the estimate.
//!
//! The number of pool points the teacher mislabels is unknown; it is
//! estimated from the teacher's error rate on a labeled validation sample.
//! [`bernstein_bound`] bounds the per-point deviation of that estimate, and
//! [`competitiveness_report`] quantifies how much objective is lost when the
//! shrunk estimate `m_hat / (1 + eps)` is used in place of the true count.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::solver::{descending_order, solve_general, LossModel, RobustInstance};

/// Default validation size for small datasets.
pub const VALIDATION_SIZE_SMALL: usize = 1_000;
/// Default validation size for large datasets.
pub const VALIDATION_SIZE_LARGE: usize = 10_000;

/// Variance term used in the Bernstein bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundMode {
    /// Plug in the observed error rate for `p`.
    #[default]
    PlugIn,
    /// Use the worst case `p (1 - p) = 1/4`.
    Conservative,
}

/// Estimated mislabel count with its deviation bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MislabelEstimate {
    /// `err_rate * pool_size`.
    pub m_hat: f64,
    /// Size of the pool the estimate refers to.
    pub pool_size: usize,
    /// Number of validation pairs.
    pub validation_size: usize,
    /// Fraction of validation pairs the teacher gets wrong.
    pub err_rate: f64,
    /// Failure probability of the bound.
    pub delta: f64,
    /// Bound on `|m - m_hat| / pool_size` holding with probability `1 - delta`.
    pub bound: f64,
}

/// Bernstein deviation bound on `|m - m_hat| / pool` for a validation sample
/// of size `k` and mislabel probability `p`:
///
/// ```text
/// log(4/d) (1/pool + 1/k) + sqrt(2 p (1-p) log(4/d)) (1/sqrt(pool) + 1/sqrt(k))
/// ```
pub fn bernstein_bound(p: f64, pool_size: usize, k: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if pool_size == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "pool size {pool_size} and validation size {k} must be positive"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    let log_term = math::ln(4.0 / delta);
    let (pool, k) = (pool_size as f64, k as f64);
    Ok(log_term * (1.0 / pool + 1.0 / k)
        + math::sqrt(2.0 * p * (1.0 - p) * log_term) * (1.0 / math::sqrt(pool) + 1.0 / math::sqrt(k)))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} outside (0, 1)")));
    }
    Ok(())
}

/// Estimates the mislabel count of a pool of `pool_size` points from
/// `(predicted, true)` validation pairs, with the plug-in Bernstein bound.
pub fn estimate_m<L: PartialEq>(
    validation: &[(L, L)],
    pool_size: usize,
    delta: f64,
) -> Result<MislabelEstimate> {
    estimate_m_with(validation, pool_size, delta, BoundMode::PlugIn)
}

/// [`estimate_m`] with an explicit choice of variance term.
pub fn estimate_m_with<L: PartialEq>(
    validation: &[(L, L)],
    pool_size: usize,
    delta: f64,
    mode: BoundMode,
) -> Result<MislabelEstimate> {
    if validation.is_empty() {
        return Err(Error::EmptyValidation);
    }
    let wrong = validation.iter().filter(|(pred, truth)| pred != truth).count();
    estimate_from_counts(wrong, validation.len(), pool_size, delta, mode)
}

/// Same as [`estimate_m_with`] when only the mismatch count is known.
pub fn estimate_from_counts(
    wrong: usize,
    validation_size: usize,
    pool_size: usize,
    delta: f64,
    mode: BoundMode,
) -> Result<MislabelEstimate> {
    if validation_size == 0 {
        return Err(Error::EmptyValidation);
    }
    if wrong > validation_size {
        return Err(Error::InvalidParameter(format!(
            "{wrong} mismatches in {validation_size} validation pairs"
        )));
    }
    let err_rate = wrong as f64 / validation_size as f64;
    let p = match mode {
        BoundMode::PlugIn => err_rate,
        BoundMode::Conservative => 0.5,
    };
    let bound = bernstein_bound(p, pool_size, validation_size, delta)?;
    Ok(MislabelEstimate {
        m_hat: err_rate * pool_size as f64,
        pool_size,
        validation_size,
        err_rate,
        delta,
        bound,
    })
}

/// Shrinks an estimate so that it undershoots the truth: `m_hat / (1 + eps)`.
pub fn shrink_m(m_hat: f64, epsilon: f64) -> f64 {
    m_hat / (1.0 + epsilon)
}

/// Default size of the uniform bootstrap sample: `max(100, ceil(0.1 b))`,
/// never more than `b`.
pub fn bootstrap_budget(b: usize) -> usize {
    let tenth = math::ceil(0.1 * b as f64) as usize;
    tenth.max(100).min(b)
}

/// Objective lost by solving with a shrunk estimate of `m`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ApproxMReport {
    /// True mislabel count (in relative mode, already scaled by `1 + w`).
    pub m_true: f64,
    /// `m_hat / (1 + eps)` (same scaling).
    pub m_tilde: f64,
    /// Relative accuracy of the estimate.
    pub epsilon: f64,
    /// Gain at the boundary of the true-`m` optimal support.
    pub alpha: f64,
    /// `alpha / (2 (2 - alpha))`.
    pub beta: f64,
    /// Whether the guarantee applies: `eps < beta`, `m_hat` within
    /// `(1 +- eps) m`, and `m` a whole number.
    pub precondition_ok: bool,
    /// `1 - 2 eps m / (2 eps m + 1 + eps)`.
    pub guaranteed_ratio: f64,
    /// `Obj(k_tilde, m) / Obj(k_m, m)`.
    pub realized_ratio: f64,
    /// Support size chosen with the true `m`.
    pub k_true: usize,
    /// Support size chosen with `m_tilde`.
    pub k_tilde: usize,
}

/// Zero-loss objective `(k - m) / sum_{i<=k} 1/g_(i)` for a descending prefix.
fn prefix_objective(sorted_inv_prefix: &[f64], k: usize, m: f64) -> f64 {
    (k as f64 - m) / sorted_inv_prefix[k - 1]
}

/// Compares the support chosen with `m_tilde = m_hat / (1 + eps)` against the
/// one chosen with the true `m`, in the zero-loss game.
pub fn competitiveness_report(
    gains: &[f64],
    m_true: f64,
    m_hat: f64,
    epsilon: f64,
) -> Result<ApproxMReport> {
    report_inner(gains, m_true, m_hat, epsilon, 1.0)
}

/// Relative-loss variant: the relative game with weight `w` is the zero-loss
/// game with budget `(1 + w) m`, so both `m` and `m_hat` are scaled by
/// `1 + w`. The integrality requirement applies to the unscaled `m`.
pub fn competitiveness_report_relative(
    gains: &[f64],
    m_true: f64,
    m_hat: f64,
    epsilon: f64,
    w: f64,
) -> Result<ApproxMReport> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidWeight(w));
    }
    report_inner(gains, m_true, m_hat, epsilon, 1.0 + w)
}

fn report_inner(
    gains: &[f64],
    m_true: f64,
    m_hat: f64,
    epsilon: f64,
    scale: f64,
) -> Result<ApproxMReport> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be >= 0")));
    }
    let m = m_true * scale;
    let m_tilde = shrink_m(m_hat * scale, epsilon);
    let instance = RobustInstance::new(gains, LossModel::Zero, m)?;
    let true_sol = solve_general(&instance);
    let tilde_sol = solve_general(&instance.with_budget(m_tilde)?);

    let values = instance.gains().values();
    let order = descending_order(values);
    let inv_prefix: Vec<f64> = order
        .iter()
        .scan(0.0, |acc, &pos| {
            *acc += 1.0 / values[pos];
            Some(*acc)
        })
        .collect();

    let alpha = values[order[true_sol.k_star - 1]];
    let beta = alpha / (2.0 * (2.0 - alpha));
    let within = m_hat >= (1.0 - epsilon) * m_true && m_hat <= (1.0 + epsilon) * m_true;
    let integral = m_true == math::floor(m_true);
    let precondition_ok = epsilon < beta && within && integral;

    let guaranteed_ratio = 1.0 - 2.0 * epsilon * m / (2.0 * epsilon * m + (1.0 + epsilon));
    let opt = prefix_objective(&inv_prefix, true_sol.k_star, m);
    let achieved = prefix_objective(&inv_prefix, tilde_sol.k_star, m);
    let realized_ratio = if true_sol.k_star == tilde_sol.k_star {
        1.0
    } else {
        achieved / opt
    };
    Ok(ApproxMReport {
        m_true: m,
        m_tilde,
        epsilon,
        alpha,
        beta,
        precondition_ok,
        guaranteed_ratio,
        realized_ratio,
        k_true: true_sol.k_star,
        k_tilde: tilde_sol.k_star,
    })
}
