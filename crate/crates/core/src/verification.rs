//! Brute-force oracles and random instance generators.
//!
//! The grid oracle enumerates every point of the probability simplex at a
//! fixed resolution and evaluates the game exactly, which is independent of
//! the closed-form solver. It is limited to four points.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::rng;
use crate::solver::{game_value, LossModel, RobustInstance};

/// Best grid distribution found by [`grid_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Largest game value on the grid.
    pub best_value: f64,
    /// Distribution achieving it, caller order.
    pub best_p: Vec<f64>,
    /// Grid resolution.
    pub grid_step: f64,
    /// Number of grid points evaluated.
    pub evaluations: usize,
}

/// Number of simplex grid points for `n` coordinates and `ticks` steps:
/// `C(ticks + n - 1, n - 1)`.
pub fn grid_cardinality(n: usize, ticks: usize) -> usize {
    let mut c: u128 = 1;
    for i in 1..n {
        c = c * (ticks + i) as u128 / i as u128;
    }
    c as usize
}

/// Maximizes the game value over the simplex grid with resolution `step`.
pub fn grid_oracle(instance: &RobustInstance, step: f64) -> Result<OracleResult> {
    let n = instance.n();
    if n > 4 {
        return Err(Error::TooLarge(n));
    }
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::InvalidStep(step));
    }
    let ticks = math::round(1.0 / step) as usize;
    let original = instance.gains().original_index();

    let mut counts = vec![0usize; n];
    let mut p = vec![0.0; instance.total_len()];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_p = p.clone();
    let mut evaluations = 0;
    // Odometer over compositions of `ticks` into `n` parts.
    counts[n - 1] = ticks;
    loop {
        for (pos, &idx) in original.iter().enumerate() {
            p[idx] = counts[pos] as f64 / ticks as f64;
        }
        let v = game_value(instance, &p)?;
        evaluations += 1;
        if v > best_value {
            best_value = v;
            best_p.copy_from_slice(&p);
        }
        if !next_composition(&mut counts) {
            break;
        }
    }
    Ok(OracleResult {
        best_value,
        best_p,
        grid_step: 1.0 / ticks as f64,
        evaluations,
    })
}

/// Advances to the next composition in lexicographic order of the leading
/// coordinates; the last coordinate absorbs the remainder.
fn next_composition(counts: &mut [usize]) -> bool {
    let n = counts.len();
    if n < 2 {
        return false;
    }
    let total: usize = counts.iter().sum();
    // Find the rightmost leading coordinate that can still grow.
    let mut i = n - 2;
    loop {
        let used: usize = counts[..=i].iter().sum();
        if used < total {
            counts[i] += 1;
            for c in &mut counts[i + 1..n - 1] {
                *c = 0;
            }
            let lead: usize = counts[..n - 1].iter().sum();
            counts[n - 1] = total - lead;
            return true;
        }
        if i == 0 {
            return false;
        }
        i -= 1;
    }
}

/// How the adversary budget of a random instance is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MPolicy {
    /// Always this value (must be below `n`).
    Fixed(f64),
    /// `fraction * n`.
    Fraction(f64),
    /// Uniform integer in `0..n`.
    UniformInteger,
    /// Uniform real in `[0, n)`.
    UniformReal,
    /// Uniform integer in `[0, G_n]`, where `G_n = sum g/(g+l)`; keeps the
    /// game value non-negative.
    FeasibleInteger,
    /// Uniform real in `[0, G_n)`.
    FeasibleReal,
}

/// How the losses of a random instance are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossPolicy {
    /// No losses.
    Zero,
    /// Relative losses with a fixed weight.
    Relative(f64),
    /// Relative losses with `w` uniform in `[0, 1]`.
    RelativeRandom,
    /// Relative losses with `w = 1 - m/n`.
    RelativeDefault,
    /// Independent losses uniform in `[0, max]`.
    ExplicitUniform(f64),
}

/// Draws a random instance: `n` uniform in `n_range`, gains i.i.d. uniform on
/// `(0.01, 1)`, budget and losses per policy.
pub fn random_instance(
    seed: u64,
    n_range: RangeInclusive<usize>,
    m_policy: MPolicy,
    loss_policy: LossPolicy,
) -> Result<RobustInstance> {
    let mut rng = rng::seeded(seed);
    let n = rng.random_range(n_range);
    let gains: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    random_instance_for_gains(&mut rng, gains, m_policy, loss_policy)
}

fn random_instance_for_gains<R: Rng>(
    rng: &mut R,
    gains: Vec<f64>,
    m_policy: MPolicy,
    loss_policy: LossPolicy,
) -> Result<RobustInstance> {
    let n = gains.len();
    let nf = n as f64;
    // Explicit losses and random weights are drawn before m so the feasible
    // policies can see G_n.
    let losses = match loss_policy {
        LossPolicy::Zero => Some(LossModel::Zero),
        LossPolicy::Relative(w) => Some(LossModel::Relative(w)),
        LossPolicy::RelativeRandom => Some(LossModel::Relative(rng.random_range(0.0..=1.0))),
        LossPolicy::ExplicitUniform(max) => Some(LossModel::Explicit(
            (0..n).map(|_| rng.random_range(0.0..=max)).collect(),
        )),
        LossPolicy::RelativeDefault => None,
    };
    let g_total = |model: &LossModel| -> f64 {
        match model {
            LossModel::Zero => nf,
            LossModel::Relative(w) => nf / (1.0 + w),
            LossModel::Explicit(l) => gains.iter().zip(l).map(|(g, l)| g / (g + l)).sum(),
        }
    };
    let draw_m = |rng: &mut R, cap: f64| -> f64 {
        match m_policy {
            MPolicy::Fixed(m) => m,
            MPolicy::Fraction(f) => f * nf,
            MPolicy::UniformInteger => rng.random_range(0..n) as f64,
            MPolicy::UniformReal => rng.random_range(0.0..nf),
            MPolicy::FeasibleInteger => {
                let top = (math::floor(cap) as usize).min(n - 1);
                rng.random_range(0..=top) as f64
            }
            MPolicy::FeasibleReal => rng.random_range(0.0..cap.min(nf)),
        }
    };
    let (losses, m) = match losses {
        Some(model) => {
            let m = draw_m(rng, g_total(&model));
            (model, m)
        }
        None => {
            // G_n - m >= 0 holds for every m < n under w = 1 - m/n.
            let m = draw_m(rng, nf);
            (LossModel::Relative(1.0 - m / nf), m)
        }
    };
    RobustInstance::new(&gains, losses, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_general;

    #[test]
    fn cardinality_formula() {
        assert_eq!(grid_cardinality(1, 100), 1);
        assert_eq!(grid_cardinality(2, 100), 101);
        assert_eq!(grid_cardinality(3, 100), 5151);
        assert_eq!(grid_cardinality(4, 10), 286);
    }

    #[test]
    fn enumerates_whole_grid() {
        for n in 1..=4 {
            let gains: Vec<f64> = (0..n).map(|i| 0.9 - 0.1 * i as f64).collect();
            let inst = RobustInstance::new(&gains, LossModel::Zero, 0.0).unwrap();
            let r = grid_oracle(&inst, 0.05).unwrap();
            assert_eq!(r.evaluations, grid_cardinality(n, 20));
        }
    }

    #[test]
    fn symmetric_pair_on_grid() {
        let inst = RobustInstance::new(&[1.0, 1.0], LossModel::Zero, 1.0).unwrap();
        let r = grid_oracle(&inst, 0.01).unwrap();
        assert!((r.best_value - 0.5).abs() < 1e-12);
        assert!((r.best_p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn relative_example_on_grid() {
        let inst = RobustInstance::new(&[0.9, 0.6, 0.3], LossModel::Relative(0.5), 1.0).unwrap();
        let r = grid_oracle(&inst, 0.01).unwrap();
        let closed = solve_general(&inst).opt_value;
        assert!((r.best_value - closed).abs() <= 0.01 * 1.35);
        assert!(r.best_value <= closed + 1e-12);
    }

    #[test]
    fn zero_budget_picks_vertex() {
        let inst = RobustInstance::new(&[0.3, 0.8, 0.5], LossModel::Relative(0.4), 0.0).unwrap();
        let r = grid_oracle(&inst, 0.1).unwrap();
        assert_eq!(r.best_p, vec![0.0, 1.0, 0.0]);
        assert!((r.best_value - 0.8).abs() < 1e-15);
    }

    #[test]
    fn oracle_errors() {
        let inst = RobustInstance::new(&[0.5; 5], LossModel::Zero, 0.0).unwrap();
        assert_eq!(grid_oracle(&inst, 0.1), Err(Error::TooLarge(5)));
        let inst = RobustInstance::new(&[0.5; 2], LossModel::Zero, 0.0).unwrap();
        assert_eq!(grid_oracle(&inst, 0.2), Err(Error::InvalidStep(0.2)));
        assert_eq!(grid_oracle(&inst, 0.0), Err(Error::InvalidStep(0.0)));
    }

    #[test]
    fn random_instances_replay() {
        let a = random_instance(7, 2..=50, MPolicy::UniformReal, LossPolicy::RelativeRandom).unwrap();
        let b = random_instance(7, 2..=50, MPolicy::UniformReal, LossPolicy::RelativeRandom).unwrap();
        assert_eq!(a, b);
        assert!(a.gains().values().iter().all(|g| (0.01..1.0).contains(g)));
    }

    #[test]
    fn fraction_policy() {
        let inst = random_instance(1, 10..=10, MPolicy::Fraction(0.2), LossPolicy::Zero).unwrap();
        assert_eq!(inst.m(), 2.0);
    }

    #[test]
    fn feasible_policies_keep_value_nonnegative() {
        for seed in 0..200 {
            let loss = if seed % 2 == 0 {
                LossPolicy::ExplicitUniform(2.0)
            } else {
                LossPolicy::RelativeRandom
            };
            let m_policy = if seed % 3 == 0 {
                MPolicy::FeasibleInteger
            } else {
                MPolicy::FeasibleReal
            };
            let inst = random_instance(seed, 2..=40, m_policy, loss).unwrap();
            assert!(solve_general(&inst).opt_value >= -1e-12);
        }
    }
}
