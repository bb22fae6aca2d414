//! From a single-pick distribution to a batch of `b` points.
//!
//! [`plan_batch`] turns `p` into per-point inclusion probabilities `q`, and
//! the two rounding schemes realize a set from `q`: [`dep_round`] returns
//! exactly `sum(q)` points with marginals `q`, [`bernoulli_round`] includes
//! each point independently.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::rng;
use crate::solver::check_distribution;

/// Values this close to 0 or 1 are treated as already rounded.
const SNAP: f64 = 1e-12;

/// How `b * p` is turned into inclusion probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PlanMode {
    /// `q_i = min(b p_i, 1)`; the total may fall short of `b`.
    PaperCap,
    /// Cap at 1 and rescale the uncapped remainder until the total is
    /// `min(b, |support|)`.
    WaterFill,
}

/// Inclusion probabilities for a batch.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BatchPlan {
    /// Inclusion probability per point, caller order.
    pub q: Vec<f64>,
    /// Requested batch size.
    pub b: usize,
    /// Planning mode.
    pub mode: PlanMode,
    /// `sum(q)`.
    pub effective_total: f64,
}

/// A realized batch.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BatchSample {
    /// Selected indices, ascending.
    pub indices: Vec<usize>,
    /// Seed that produced the sample.
    pub seed: u64,
}

/// Plans inclusion probabilities for a batch of `b` points.
pub fn plan_batch(p: &[f64], b: usize, mode: PlanMode) -> Result<BatchPlan> {
    check_distribution(p)?;
    if b < 1 {
        return Err(Error::InvalidBatch);
    }
    let bf = b as f64;
    let q = match mode {
        PlanMode::PaperCap => p.iter().map(|&pi| (bf * pi.max(0.0)).min(1.0)).collect(),
        PlanMode::WaterFill => water_fill(p, b),
    };
    let effective_total = q.iter().sum();
    Ok(BatchPlan {
        q,
        b,
        mode,
        effective_total,
    })
}

fn water_fill(p: &[f64], b: usize) -> Vec<f64> {
    let support = p.iter().filter(|&&x| x > 0.0).count();
    let target = b.min(support);
    let mut q = alloc::vec![0.0; p.len()];
    let mut capped = alloc::vec![false; p.len()];
    if target == support {
        for (qi, &pi) in q.iter_mut().zip(p) {
            if pi > 0.0 {
                *qi = 1.0;
            }
        }
        return q;
    }
    let max = p.iter().copied().fold(0.0, f64::max);
    if b as f64 * max <= 1.0 {
        return p.iter().map(|&pi| b as f64 * pi.max(0.0)).collect();
    }
    let mut n_capped = 0usize;
    loop {
        let free_mass: f64 = p
            .iter()
            .zip(&capped)
            .filter(|(_, &c)| !c)
            .map(|(&pi, _)| pi.max(0.0))
            .sum();
        let scale = (target - n_capped) as f64 / free_mass;
        let mut newly_capped = false;
        for i in 0..p.len() {
            if capped[i] {
                continue;
            }
            let v = p[i].max(0.0) * scale;
            if v >= 1.0 {
                capped[i] = true;
                n_capped += 1;
                newly_capped = true;
                q[i] = 1.0;
            } else {
                q[i] = v;
            }
        }
        if !newly_capped {
            return q;
        }
    }
}

/// Largest batch size for which `b * p` needs no capping: `floor(1 / max p)`.
pub fn max_safe_batch(p: &[f64]) -> Result<usize> {
    check_distribution(p)?;
    let max = p.iter().copied().fold(0.0, f64::max);
    Ok((math::floor(1.0 / max) as usize).max(1))
}

fn check_unit_interval(q: &[f64]) -> Result<()> {
    for (index, &value) in q.iter().enumerate() {
        if !(-SNAP..=1.0 + SNAP).contains(&value) {
            return Err(Error::OutOfRange { index, value });
        }
    }
    Ok(())
}

/// One pairwise update of dependent rounding.
///
/// With `a = min(1 - x, y)` and `b = min(x, 1 - y)`, returns `(x + a, y - a)`
/// when `u < b / (a + b)` and `(x - b, y + b)` otherwise. The pair sum is
/// preserved and each coordinate keeps its expectation; at least one output
/// is 0 or 1.
pub fn dep_round_step(x: f64, y: f64, u: f64) -> (f64, f64) {
    let alpha = (1.0 - x).min(y);
    let beta = x.min(1.0 - y);
    if u < beta / (alpha + beta) {
        if alpha == 1.0 - x {
            (1.0, y - alpha)
        } else {
            (x + y, 0.0)
        }
    } else if beta == x {
        (0.0, x + y)
    } else {
        (x - beta, 1.0)
    }
}

fn is_fractional(v: f64) -> bool {
    v > SNAP && v < 1.0 - SNAP
}

/// Dependent rounding driven by an external generator.
///
/// Scans left to right keeping one open fractional entry and pairing it with
/// the next fractional entry, so the run is linear in `q.len()`.
pub fn dep_round_with<R: Rng + ?Sized>(q: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    check_unit_interval(q)?;
    let total: f64 = q.iter().sum();
    let b = math::round(total);
    if (total - b).abs() > 1e-9 {
        return Err(Error::NonIntegralTotal(total));
    }
    let mut chosen = Vec::with_capacity(b as usize);
    let mut open: Option<(usize, f64)> = None;
    for (j, &qj) in q.iter().enumerate() {
        if !is_fractional(qj) {
            if qj >= 1.0 - SNAP {
                chosen.push(j);
            }
            continue;
        }
        let Some((i, qi)) = open else {
            open = Some((j, qj));
            continue;
        };
        let (ni, nj) = dep_round_step(qi, qj, rng.random::<f64>());
        // Exactly one of the pair stays open (or neither).
        open = None;
        for (idx, v) in [(i, ni), (j, nj)] {
            if is_fractional(v) {
                open = Some((idx, v));
            } else if v >= 1.0 - SNAP {
                chosen.push(idx);
            }
        }
    }
    if let Some((i, v)) = open {
        // Only rounding residue can remain here.
        if v >= 0.5 {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Draws exactly `sum(q)` indices whose inclusion marginals equal `q`.
pub fn dep_round(q: &[f64], seed: u64) -> Result<BatchSample> {
    let mut rng = rng::seeded(seed);
    Ok(BatchSample {
        indices: dep_round_with(q, &mut rng)?,
        seed,
    })
}

/// Independent inclusion driven by an external generator.
pub fn bernoulli_round_with<R: Rng + ?Sized>(q: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    check_unit_interval(q)?;
    Ok(q
        .iter()
        .enumerate()
        .filter(|(_, &qi)| rng.random::<f64>() < qi)
        .map(|(i, _)| i)
        .collect())
}

/// Includes each index independently with probability `q_i`.
pub fn bernoulli_round(q: &[f64], seed: u64) -> Result<BatchSample> {
    let mut rng = rng::seeded(seed);
    Ok(BatchSample {
        indices: bernoulli_round_with(q, &mut rng)?,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn unit_batch_is_identity() {
        let p = [0.5, 0.3, 0.2];
        for mode in [PlanMode::PaperCap, PlanMode::WaterFill] {
            let plan = plan_batch(&p, 1, mode).unwrap();
            for (q, pi) in plan.q.iter().zip(p) {
                assert!((q - pi).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn paper_cap_example() {
        let plan = plan_batch(&[0.6, 0.3, 0.1], 2, PlanMode::PaperCap).unwrap();
        assert_eq!(plan.q, vec![1.0, 0.6, 0.2]);
        assert!((plan.effective_total - 1.8).abs() < 1e-15);
    }

    #[test]
    fn water_fill_example() {
        let plan = plan_batch(&[0.6, 0.3, 0.1], 2, PlanMode::WaterFill).unwrap();
        assert_eq!(plan.q[0], 1.0);
        assert!((plan.q[1] - 0.75).abs() < 1e-12);
        assert!((plan.q[2] - 0.25).abs() < 1e-12);
        assert!((plan.effective_total - 2.0).abs() < 1e-9);
        // Uncapped entries stay proportional to p.
        assert!((plan.q[1] / plan.q[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn water_fill_cascades_and_saturates() {
        // First pass caps 0.5; the rescale then caps 0.3 as well.
        let plan = plan_batch(&[0.5, 0.3, 0.1, 0.1], 3, PlanMode::WaterFill).unwrap();
        assert_eq!(&plan.q[..2], &[1.0, 1.0]);
        assert!((plan.q[2] - 0.5).abs() < 1e-12 && (plan.q[3] - 0.5).abs() < 1e-12);
        let plan = plan_batch(&[0.5, 0.5, 0.0], 5, PlanMode::WaterFill).unwrap();
        assert_eq!(plan.q, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn water_fill_is_idempotent_on_feasible_plans() {
        let p = [0.25, 0.25, 0.2, 0.2, 0.1];
        let plan = plan_batch(&p, 4, PlanMode::WaterFill).unwrap();
        for (q, pi) in plan.q.iter().zip(p) {
            assert_eq!(*q, 4.0 * pi);
        }
    }

    #[test]
    fn plan_errors() {
        assert_eq!(plan_batch(&[1.0], 0, PlanMode::PaperCap), Err(Error::InvalidBatch));
        assert!(matches!(
            plan_batch(&[0.6, 0.6], 1, PlanMode::PaperCap),
            Err(Error::NotADistribution(_))
        ));
    }

    #[test]
    fn safe_batch() {
        assert_eq!(max_safe_batch(&[0.25; 4]).unwrap(), 4);
        assert_eq!(max_safe_batch(&[0.5, 0.5]).unwrap(), 2);
        assert_eq!(max_safe_batch(&[0.4, 0.35, 0.25]).unwrap(), 2);
        assert_eq!(max_safe_batch(&[1.0, 0.0]).unwrap(), 1);
    }

    #[test]
    fn integral_plans_round_deterministically() {
        let q = [1.0, 0.0, 1.0, 1.0, 0.0];
        for seed in 0..20 {
            assert_eq!(dep_round(&q, seed).unwrap().indices, vec![0, 2, 3]);
        }
    }

    #[test]
    fn dep_round_errors() {
        assert!(matches!(dep_round(&[0.5, 0.6], 0), Err(Error::NonIntegralTotal(_))));
        assert!(matches!(dep_round(&[1.5, -0.5], 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(bernoulli_round(&[0.5, 1.2], 0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn step_conserves_pair_sum_and_expectation() {
        for &(x, y) in &[(0.3, 0.4), (0.7, 0.8), (0.5, 0.5), (0.1, 0.95), (0.6, 0.2)] {
            let alpha = f64::min(1.0 - x, y);
            let beta = f64::min(x, 1.0 - y);
            let p_up = beta / (alpha + beta);
            let up = dep_round_step(x, y, 0.0);
            let down = dep_round_step(x, y, 1.0 - 1e-16);
            for (a, b) in [up, down] {
                assert!((a + b - (x + y)).abs() < 1e-15);
                assert!(!is_fractional(a) || !is_fractional(b));
            }
            let ex = p_up * up.0 + (1.0 - p_up) * down.0;
            let ey = p_up * up.1 + (1.0 - p_up) * down.1;
            assert!((ex - x).abs() < 1e-15, "{ex} vs {x}");
            assert!((ey - y).abs() < 1e-15);
        }
        // Ties branch with probability one half.
        assert_eq!(dep_round_step(0.5, 0.5, 0.49), (1.0, 0.0));
        assert_eq!(dep_round_step(0.5, 0.5, 0.51), (0.0, 1.0));
    }

    #[test]
    fn bernoulli_extremes() {
        assert!(bernoulli_round(&[0.0; 7], 3).unwrap().indices.is_empty());
        assert_eq!(bernoulli_round(&[1.0; 4], 3).unwrap().indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn seeded_replay() {
        let q = [0.3, 0.7, 0.4, 0.6];
        assert_eq!(dep_round(&q, 99).unwrap(), dep_round(&q, 99).unwrap());
        assert_eq!(bernoulli_round(&q, 99).unwrap(), bernoulli_round(&q, 99).unwrap());
    }
}
