//! Desk-scale simulators.
//!
//! [`game`] plays selection strategies against mislabeling worlds on a pool
//! of static gains; [`distill`] runs the full acquire-label-retrain loop with
//! a softmax-regression student and teacher ([`softmax`]).
//!
//! Strategies only ever see a [`SelectionView`]: gains, entropies and an
//! aggregate mistake count. The per-point correctness mask is handed to
//! [`select`] separately and only the oracle strategy reads it.

pub mod distill;
pub mod game;
pub mod softmax;

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling::{dep_round_with, plan_batch, PlanMode};
use crate::solver::{default_w, descending_order, solve_relative};

/// Acquisition strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StrategyKind {
    /// Uniform without replacement.
    Uniform,
    /// Top-`b` gains.
    MarginGreedy,
    /// Top-`b` prediction entropies.
    EntropyGreedy,
    /// Minimax-robust sampling with relative loss weight `w` (default
    /// `1 - m/n` when absent).
    Rad {
        /// Relative loss weight.
        #[cfg_attr(feature = "serde", serde(default))]
        w: Option<f64>,
    },
    /// Top-`b` gains among correctly labeled points; reads the hidden mask.
    OracleRobust,
}

impl StrategyKind {
    /// Short label used in traces.
    pub fn label(&self) -> String {
        match self {
            StrategyKind::Uniform => "uniform".into(),
            StrategyKind::MarginGreedy => "margin_greedy".into(),
            StrategyKind::EntropyGreedy => "entropy_greedy".into(),
            StrategyKind::Rad { w: None } => "rad".into(),
            StrategyKind::Rad { w: Some(w) } => format!("rad(w={w})"),
            StrategyKind::OracleRobust => "oracle_robust".into(),
        }
    }

    /// Whether the strategy is allowed to read the correctness mask.
    pub fn reads_mask(&self) -> bool {
        matches!(self, StrategyKind::OracleRobust)
    }
}

/// What a non-oracle strategy may look at.
#[derive(Debug, Clone, Copy)]
pub struct SelectionView<'a> {
    /// Gain of each pool point.
    pub gains: &'a [f64],
    /// Prediction entropy of each pool point.
    pub entropies: &'a [f64],
    /// Number of pool points the teacher is believed to mislabel.
    pub m: f64,
}

/// A strategy's choice for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Selected pool positions, ascending.
    pub indices: Vec<usize>,
    /// Single-pick distribution the batch was drawn from (RAD only).
    pub distribution: Option<Vec<f64>>,
    /// Game value of that distribution (RAD only).
    pub opt_value: Option<f64>,
    /// Relative loss weight RAD solved with.
    pub w: Option<f64>,
}

impl Selection {
    fn plain(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        Self {
            indices,
            distribution: None,
            opt_value: None,
            w: None,
        }
    }
}

fn top_by(values: &[f64], b: usize, eligible: impl Fn(usize) -> bool) -> Vec<usize> {
    descending_order(values)
        .into_iter()
        .filter(|&i| eligible(i))
        .take(b)
        .collect()
}

/// Picks `b` pool positions with strategy `kind`.
///
/// `mask` (true = teacher correct) is consulted only by
/// [`StrategyKind::OracleRobust`], which fails without it.
pub fn select<R: Rng + ?Sized>(
    kind: StrategyKind,
    view: &SelectionView<'_>,
    mask: Option<&[bool]>,
    b: usize,
    rng: &mut R,
) -> Result<Selection> {
    let n = view.gains.len();
    if b > n {
        return Err(Error::BudgetExhausted {
            available: n,
            requested: b,
        });
    }
    match kind {
        StrategyKind::Uniform => Ok(Selection::plain(index::sample(rng, n, b).into_vec())),
        StrategyKind::MarginGreedy => Ok(Selection::plain(top_by(view.gains, b, |_| true))),
        StrategyKind::EntropyGreedy => Ok(Selection::plain(top_by(view.entropies, b, |_| true))),
        StrategyKind::OracleRobust => {
            let mask = mask.ok_or_else(|| Error::ConfigError("oracle strategy needs the mask".into()))?;
            Ok(Selection::plain(top_by(view.gains, b, |i| mask[i])))
        }
        StrategyKind::Rad { w } => rad_select(view, w, b, rng),
    }
}

/// Solves the relative-loss game on the pool, plans a water-filled batch and
/// rounds it. When the optimal support is smaller than `b`, the batch is
/// topped up with the next-highest gains (the support is a top-gain prefix,
/// so this extends it in order).
fn rad_select<R: Rng + ?Sized>(
    view: &SelectionView<'_>,
    w: Option<f64>,
    b: usize,
    rng: &mut R,
) -> Result<Selection> {
    let n = view.gains.len();
    let m = view.m.max(0.0);
    if b == 0 || m >= n as f64 {
        return Ok(Selection {
            indices: Vec::new(),
            distribution: None,
            opt_value: None,
            w,
        });
    }
    let w = match w {
        Some(w) => w,
        None => default_w(m, n)?,
    };
    let sol = solve_relative(view.gains, m, w)?;
    if sol.should_abstain {
        return Ok(Selection {
            indices: Vec::new(),
            distribution: Some(sol.probs),
            opt_value: Some(sol.opt_value),
            w: Some(w),
        });
    }
    let plan = plan_batch(&sol.probs, b, PlanMode::WaterFill)?;
    let mut indices = dep_round_with(&plan.q, rng)?;
    if indices.len() < b {
        let mut taken = vec![false; n];
        for &i in &indices {
            taken[i] = true;
        }
        let extra: Vec<usize> = sol
            .sort_perm
            .iter()
            .copied()
            .filter(|&i| !taken[i])
            .take(b - indices.len())
            .collect();
        indices.extend(extra);
        indices.sort_unstable();
    }
    Ok(Selection {
        indices,
        distribution: Some(sol.probs),
        opt_value: Some(sol.opt_value),
        w: Some(w),
    })
}

/// Payoff of selecting `indices`: `sum (g_i c_i - (1 - c_i) l_i)`.
pub fn realized_gain(gains: &[f64], losses: &[f64], mask: &[bool], indices: &[usize]) -> f64 {
    indices
        .iter()
        .map(|&i| if mask[i] { gains[i] } else { -losses[i] })
        .sum()
}

/// Expected single-pick payoff of `p` against a fixed mask:
/// `sum p_i (c_i (g_i + l_i) - l_i)`.
pub fn expected_payoff(gains: &[f64], losses: &[f64], p: &[f64], mask: &[bool]) -> f64 {
    p.iter()
        .zip(gains.iter().zip(losses))
        .zip(mask)
        .map(|((&pi, (&g, &l)), &c)| pi * if c { g } else { -l })
        .sum()
}

/// Mean and standard error of a sample.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, crate::math::sqrt(var / n as f64))
}

/// 64-bit FNV-1a hash, used to fingerprint configurations.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn view<'a>(gains: &'a [f64], entropies: &'a [f64], m: f64) -> SelectionView<'a> {
        SelectionView { gains, entropies, m }
    }

    #[test]
    fn greedy_strategies() {
        let g = [0.2, 0.9, 0.5, 0.7];
        let e = [0.9, 0.1, 0.3, 0.2];
        let mut r = rng::seeded(0);
        let v = view(&g, &e, 1.0);
        assert_eq!(select(StrategyKind::MarginGreedy, &v, None, 2, &mut r).unwrap().indices, vec![1, 3]);
        assert_eq!(select(StrategyKind::EntropyGreedy, &v, None, 2, &mut r).unwrap().indices, vec![0, 2]);
        let mask = [true, false, true, true];
        assert_eq!(
            select(StrategyKind::OracleRobust, &v, Some(&mask), 2, &mut r).unwrap().indices,
            vec![2, 3]
        );
        assert!(select(StrategyKind::OracleRobust, &v, None, 2, &mut r).is_err());
        let u = select(StrategyKind::Uniform, &v, None, 3, &mut r).unwrap();
        assert_eq!(u.indices.len(), 3);
        assert!(select(StrategyKind::Uniform, &v, None, 5, &mut r).is_err());
    }

    #[test]
    fn rad_selects_exact_batches() {
        let g: Vec<f64> = (0..50).map(|i| 0.02 + 0.019 * i as f64).collect();
        let e = g.clone();
        let mut r = rng::seeded(3);
        let s = select(StrategyKind::Rad { w: None }, &view(&g, &e, 10.0), None, 8, &mut r).unwrap();
        assert_eq!(s.indices.len(), 8);
        assert!(s.opt_value.unwrap() >= 0.0);
        // Zero budget: support of one point, topped up greedily.
        let s = select(StrategyKind::Rad { w: None }, &view(&g, &e, 0.0), None, 4, &mut r).unwrap();
        assert_eq!(s.indices, vec![46, 47, 48, 49]);
    }

    #[test]
    fn payoffs() {
        let g = [0.5, 0.8];
        let l = [0.25, 0.4];
        assert_eq!(realized_gain(&g, &l, &[true, false], &[0, 1]), 0.5 - 0.4);
        assert!((expected_payoff(&g, &l, &[0.5, 0.5], &[true, false]) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn summary_statistics() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - crate::math::sqrt(5.0 / 3.0 / 4.0)).abs() < 1e-15);
        assert_ne!(fnv1a(b"a"), fnv1a(b"b"));
    }
}
