//! Closed-form solution of the robust sampling game.
//!
//! The learner picks a distribution `p` over `n` points; an adversary then
//! marks up to `m` of them as mislabeled (a fractional mask `c` with
//! `sum(c) = n - m`). Picking point `i` pays `g_i` when it is labeled
//! correctly and costs `l_i` otherwise. With gains sorted in descending order
//! and
//!
//! ```text
//! G_k = sum_{i<=k} g_i / (g_i + l_i)        H_k = sum_{i<=k} 1 / (g_i + l_i)
//! ```
//!
//! the optimal distribution is supported on the top `k*` gains, where `k*`
//! maximizes `(G_k - m) / H_k`, and puts `1 / (H_{k*} (g_i + l_i))` on each
//! supported point. That ratio at `k*` is the game value.
//!
//! The value is non-negative exactly when `G_n >= m`. Below that the closed
//! form is still returned, flagged with `should_abstain`, but it is no longer
//! guaranteed to be the maximin distribution; [`crate::certificate::verify`]
//! will say so.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Gains at or below this value are excluded from the game.
pub const DEFAULT_GAIN_EPS: f64 = 1e-12;

/// Relative tolerance under which two prefix ratios count as tied.
const TIE_RTOL: f64 = 1e-12;

/// Per-point gains after the eligibility filter.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector {
    values: Vec<f64>,
    original_index: Vec<usize>,
    ineligible: Vec<usize>,
    total_len: usize,
}

impl GainVector {
    /// Filters `gains` with the default eligibility threshold.
    pub fn new(gains: &[f64]) -> Result<Self> {
        Self::with_threshold(gains, DEFAULT_GAIN_EPS)
    }

    /// Keeps the gains strictly above `eps`; the rest are recorded as
    /// ineligible and always receive probability zero.
    pub fn with_threshold(gains: &[f64], eps: f64) -> Result<Self> {
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteInput("gains"));
        }
        let mut values = Vec::with_capacity(gains.len());
        let mut original_index = Vec::with_capacity(gains.len());
        let mut ineligible = Vec::new();
        for (i, &g) in gains.iter().enumerate() {
            if g > eps {
                values.push(g);
                original_index.push(i);
            } else {
                ineligible.push(i);
            }
        }
        Ok(Self {
            values,
            original_index,
            ineligible,
            total_len: gains.len(),
        })
    }

    /// Eligible gains, in caller order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Caller index of each eligible gain.
    pub fn original_index(&self) -> &[usize] {
        &self.original_index
    }

    /// Caller indices that were filtered out.
    pub fn ineligible(&self) -> &[usize] {
        &self.ineligible
    }

    /// Number of eligible points.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when no point is eligible.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Length of the caller's original gain list.
    pub fn total_len(&self) -> usize {
        self.total_len
    }
}

/// Cost of selecting a point the teacher mislabels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LossModel {
    /// Mislabeled points cost nothing.
    Zero,
    /// `l_i = w * g_i`.
    Relative(f64),
    /// Per-point losses, indexed like the caller's gain list.
    Explicit(Vec<f64>),
}

/// One instance of the robust sampling game.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustInstance {
    gains: GainVector,
    losses: LossModel,
    eligible_losses: Vec<f64>,
    m: f64,
}

impl RobustInstance {
    /// Builds and validates an instance from raw caller-order gains.
    pub fn new(gains: &[f64], losses: LossModel, m: f64) -> Result<Self> {
        Self::from_gains(GainVector::new(gains)?, losses, m)
    }

    /// Builds an instance from an already filtered gain vector.
    pub fn from_gains(gains: GainVector, losses: LossModel, m: f64) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let n = gains.len();
        if !m.is_finite() {
            return Err(Error::NonFiniteInput("adversary budget"));
        }
        if m < 0.0 || m >= n as f64 {
            return Err(Error::InvalidBudget { m, n });
        }
        let eligible_losses = match &losses {
            LossModel::Zero => vec![0.0; n],
            LossModel::Relative(w) => {
                if !w.is_finite() {
                    return Err(Error::NonFiniteInput("loss weight"));
                }
                if !(0.0..=1.0).contains(w) {
                    return Err(Error::InvalidWeight(*w));
                }
                gains.values().iter().map(|g| w * g).collect()
            }
            LossModel::Explicit(values) => {
                if values.len() != gains.total_len() {
                    return Err(Error::DimensionMismatch {
                        expected: gains.total_len(),
                        got: values.len(),
                    });
                }
                if values.iter().any(|l| !l.is_finite()) {
                    return Err(Error::NonFiniteInput("losses"));
                }
                if let Some((index, &value)) = values.iter().enumerate().find(|(_, l)| **l < 0.0) {
                    return Err(Error::NegativeLoss { index, value });
                }
                gains.original_index().iter().map(|&i| values[i]).collect()
            }
        };
        Ok(Self {
            gains,
            losses,
            eligible_losses,
            m,
        })
    }

    /// The filtered gains.
    pub fn gains(&self) -> &GainVector {
        &self.gains
    }

    /// The loss model as supplied.
    pub fn loss_model(&self) -> &LossModel {
        &self.losses
    }

    /// Losses aligned with [`GainVector::values`].
    pub fn eligible_losses(&self) -> &[f64] {
        &self.eligible_losses
    }

    /// Adversary budget.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Number of eligible points.
    pub fn n(&self) -> usize {
        self.gains.len()
    }

    /// Length of the caller index space.
    pub fn total_len(&self) -> usize {
        self.gains.total_len()
    }

    /// Eligible positions sorted by descending gain, lower caller index first
    /// among equal gains.
    pub fn descending_order(&self) -> Vec<usize> {
        descending_order(self.gains.values())
    }

    /// Same instance with a different adversary budget.
    pub fn with_budget(&self, m: f64) -> Result<Self> {
        Self::from_gains(self.gains.clone(), self.losses.clone(), m)
    }
}

/// Output of the closed-form solver.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplerSolution {
    /// Sampling probabilities in caller order; ineligible points carry 0.
    pub probs: Vec<f64>,
    /// Number of top-gain points with positive probability.
    pub k_star: usize,
    /// Worst-case expected payoff of `probs`.
    pub opt_value: f64,
    /// Set when `opt_value < 0`: not sampling beats sampling.
    pub should_abstain: bool,
    /// Caller indices of the eligible points in descending gain order.
    pub sort_perm: Vec<usize>,
}

impl SamplerSolution {
    /// Caller indices with positive probability, in descending gain order.
    pub fn support(&self) -> &[usize] {
        &self.sort_perm[..self.k_star]
    }
}

pub(crate) fn descending_order(values: &[f64]) -> Vec<usize> {
    descending_pairs(values).into_iter().map(|(_, i)| i).collect()
}

/// `(value, position)` pairs sorted by descending value, lower position
/// first among ties. Keeping the value next to its position makes the sort
/// and the prefix scans cache-local.
fn descending_pairs(values: &[f64]) -> Vec<(f64, usize)> {
    let mut keyed: Vec<(f64, usize)> = values.iter().copied().zip(0..).collect();
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed
}

/// Largest 1-based prefix length whose ratio is within tolerance of the max.
/// `ratio_at(i)` returns the ratio of the prefix ending at position `i` and
/// the magnitude the tie tolerance is relative to.
fn argmax_prefix(len: usize, ratio_at: impl Fn(usize) -> (f64, f64)) -> usize {
    let (mut best_idx, mut best, mut best_scale) = (0, f64::NEG_INFINITY, 0.0);
    for i in 0..len {
        let (r, scale) = ratio_at(i);
        if r > best {
            (best_idx, best, best_scale) = (i, r, scale);
        }
    }
    let slack = TIE_RTOL * f64::max(best_scale, best.abs());
    let k = (0..len).rev().find(|&i| ratio_at(i).0 >= best - slack).unwrap_or(best_idx);
    k + 1
}

/// Solves the game for arbitrary non-negative losses.
pub fn solve_general(instance: &RobustInstance) -> SamplerSolution {
    let gains = instance.gains.values();
    let losses = instance.eligible_losses();
    let m = instance.m;
    let order = descending_order(gains);

    let n = order.len();
    let mut prefix_g = Vec::with_capacity(n);
    let mut prefix_h = Vec::with_capacity(n);
    let (mut g_sum, mut h_sum) = (0.0, 0.0);
    for &pos in &order {
        let total = gains[pos] + losses[pos];
        g_sum += gains[pos] / total;
        h_sum += 1.0 / total;
        prefix_g.push(g_sum);
        prefix_h.push(h_sum);
    }
    let k_star = argmax_prefix(n, |i| ((prefix_g[i] - m) / prefix_h[i], (prefix_g[i] + m) / prefix_h[i]));
    let h = prefix_h[k_star - 1];
    let opt_value = (prefix_g[k_star - 1] - m) / h;

    let original = instance.gains.original_index();
    let mut probs = vec![0.0; instance.total_len()];
    for &pos in &order[..k_star] {
        probs[original[pos]] = 1.0 / (h * (gains[pos] + losses[pos]));
    }
    if k_star == 1 {
        probs[original[order[0]]] = 1.0;
    }
    SamplerSolution {
        probs,
        k_star,
        opt_value,
        should_abstain: opt_value < 0.0,
        sort_perm: order.iter().map(|&pos| original[pos]).collect(),
    }
}

/// Solves the game for relative losses `l_i = w * g_i`.
///
/// Uses the specialized form `k* = argmax_k (k - (1 + w) m) / sum_{j<=k} 1/g_j`
/// and `p_i = 1 / (g_i sum_{j<=k*} 1/g_j)`; it agrees with [`solve_general`]
/// on `LossModel::Relative(w)`.
pub fn solve_relative(gains: &[f64], m: f64, w: f64) -> Result<SamplerSolution> {
    let instance = RobustInstance::new(gains, LossModel::Relative(w), m)?;
    let sorted = descending_pairs(instance.gains.values());
    let effective = (1.0 + w) * m;

    let mut inv_sums = Vec::with_capacity(sorted.len());
    let mut inv_sum = 0.0;
    for &(g, _) in &sorted {
        inv_sum += 1.0 / g;
        inv_sums.push(inv_sum);
    }
    let k_star = argmax_prefix(sorted.len(), |i| {
        let count = (i + 1) as f64;
        ((count - effective) / inv_sums[i], (count + effective) / inv_sums[i])
    });
    let inv = inv_sums[k_star - 1];
    let opt_value = (k_star as f64 - effective) / inv;

    let original = instance.gains.original_index();
    let mut probs = vec![0.0; instance.total_len()];
    for &(g, pos) in &sorted[..k_star] {
        probs[original[pos]] = 1.0 / (g * inv);
    }
    if k_star == 1 {
        probs[original[sorted[0].1]] = 1.0;
    }
    Ok(SamplerSolution {
        probs,
        k_star,
        opt_value,
        should_abstain: opt_value < 0.0,
        sort_perm: sorted.iter().map(|&(_, pos)| original[pos]).collect(),
    })
}

/// The relative-loss weight `1 - m/n`, which keeps the game value non-negative.
pub fn default_w(m: f64, n: usize) -> Result<f64> {
    if !m.is_finite() || m < 0.0 || n == 0 || m >= n as f64 {
        return Err(Error::InvalidBudget { m, n });
    }
    Ok(1.0 - m / n as f64)
}

pub(crate) fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotADistribution(format!("non-finite entry")));
    }
    if let Some((i, x)) = p.iter().enumerate().find(|(_, x)| **x < -1e-12) {
        return Err(Error::NotADistribution(format!("negative entry {x} at index {i}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotADistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// Worst-case expected payoff of `p` (caller order) against every feasible
/// mislabeling mask.
///
/// With `s_i = p_i (g_i + l_i)`, the adversary zeroes the `floor(m)` largest
/// `s_i` and a `frac(m)` share of the next one, so the value is
/// `sum(s) - top_m(s) - sum(p_i l_i)`.
pub fn game_value(instance: &RobustInstance, p: &[f64]) -> Result<f64> {
    if p.len() != instance.total_len() {
        return Err(Error::DimensionMismatch {
            expected: instance.total_len(),
            got: p.len(),
        });
    }
    check_distribution(p)?;
    if let Some(&i) = instance.gains.ineligible().iter().find(|&&i| p[i] > 1e-12) {
        return Err(Error::NotADistribution(format!(
            "mass {} on ineligible index {i}",
            p[i]
        )));
    }
    let gains = instance.gains.values();
    let losses = instance.eligible_losses();
    let original = instance.gains.original_index();

    let mut weighted: Vec<f64> = Vec::with_capacity(gains.len());
    let mut expected_loss = 0.0;
    for (pos, &idx) in original.iter().enumerate() {
        let pi = p[idx].max(0.0);
        weighted.push(pi * (gains[pos] + losses[pos]));
        expected_loss += pi * losses[pos];
    }
    weighted.sort_unstable_by(|a, b| b.total_cmp(a));

    let whole = math::floor(instance.m) as usize;
    let frac = instance.m - whole as f64;
    // Sum what the adversary leaves intact, smallest terms first.
    let mut kept = 0.0;
    for &s in weighted[whole + 1..].iter().rev() {
        kept += s;
    }
    kept += (1.0 - frac) * weighted[whole];
    Ok(kept - expected_loss)
}
