//! Realized-gain game between selection strategies and mislabeling worlds.
//!
//! Every seed draws a pool of `n` points with gains uniform on `(0.01, 1)`
//! and a three-class prediction per point whose margin matches the gain (so
//! entropy ranks points differently from margin). Each strategy then plays
//! `rounds` rounds on its own copy of the pool: it selects `b` points, the
//! world decides which of them the teacher mislabels, the payoff is
//! recorded and the selected points leave the pool.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{mean_and_se, realized_gain, select, SelectionView, StrategyKind};
use crate::error::{Error, Result};
use crate::gains::{entropy_gain, SoftPrediction};
use crate::math;
use crate::rng;
use crate::solver::descending_order;

/// How the teacher's mistakes are placed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WorldKind {
    /// Mislabel the `m` highest-gain points of the initial pool.
    AdversarialTopGain,
    /// Each round, mislabel the `m` points with the largest
    /// `p_i (g_i + l_i)` under the strategy's distribution.
    AdversarialVsP,
    /// Independent mistakes with this probability.
    Iid {
        /// Mislabel probability.
        rate: f64,
    },
    /// Independent mistakes with probability `min(1, slope * g_i)`.
    GainCorrelated {
        /// Proportionality constant.
        slope: f64,
    },
}

/// Loss charged for a mislabeled selection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GameLoss {
    /// No loss.
    Zero,
    /// `w * g_i`.
    Relative(f64),
    /// `(1 - m/n) * g_i`.
    RelativeDefault,
}

/// Configuration of [`run_game`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GameConfig {
    /// Initial pool size.
    pub n: usize,
    /// Adversary budget.
    pub m: f64,
    /// Scoring loss.
    pub loss: GameLoss,
    /// Points selected per round.
    pub b: usize,
    /// Number of rounds.
    pub rounds: usize,
    /// Mislabeling world.
    pub world: WorldKind,
    /// Strategies to compare.
    pub strategies: Vec<StrategyKind>,
    /// One independent trial per seed.
    #[cfg_attr(feature = "serde", serde(default))]
    pub seeds: Vec<u64>,
}

/// One strategy's round within one seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundRecord {
    /// Trial seed.
    pub seed: u64,
    /// Strategy label.
    pub strategy: String,
    /// Round number, from 0.
    pub round: usize,
    /// Selected point ids (positions in the initial pool).
    pub selected: Vec<usize>,
    /// How many selected points were mislabeled.
    pub mislabeled: usize,
    /// Payoff of this round.
    pub realized_gain: f64,
    /// Payoff accumulated so far.
    pub cumulative_gain: f64,
    /// RAD's game value on the round's pool.
    pub opt_value: Option<f64>,
}

/// Per-strategy aggregate over seeds.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategySummary {
    /// Strategy label.
    pub strategy: String,
    /// Mean final cumulative gain.
    pub mean_cumulative_gain: f64,
    /// Standard error of the final cumulative gain.
    pub std_error: f64,
    /// Mean payoff of the first round.
    pub mean_first_round_gain: f64,
    /// Per-seed final cumulative gains, in seed order.
    pub per_seed: Vec<f64>,
}

/// Everything a run of [`run_game`] produced.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GameTrace {
    /// Round records, grouped by seed then strategy.
    pub rounds: Vec<RoundRecord>,
    /// One summary per configured strategy.
    pub summaries: Vec<StrategySummary>,
}

impl GameTrace {
    /// Summary for a strategy label.
    pub fn summary(&self, label: &str) -> Option<&StrategySummary> {
        self.summaries.iter().find(|s| s.strategy == label)
    }
}

/// A pool of points with their gains and predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct GamePool {
    /// Gain per point.
    pub gains: Vec<f64>,
    /// Entropy of each point's three-class prediction.
    pub entropies: Vec<f64>,
}

/// Draws `n` gains uniform on `(0.01, 1)` with a consistent prediction each.
pub fn draw_pool<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GamePool {
    let mut gains = Vec::with_capacity(n);
    let mut entropies = Vec::with_capacity(n);
    for _ in 0..n {
        let g: f64 = rng.random_range(0.01..1.0);
        let pred = prediction_with_gain(g, rng.random());
        gains.push(g);
        entropies.push(entropy_gain(&pred));
    }
    GamePool { gains, entropies }
}

/// Three-class prediction `(a, a - d, 1 - 2a + d)` with margin `d = 1 - g`;
/// `u` in `[0, 1)` places `a` within its feasible range.
pub fn prediction_with_gain(g: f64, u: f64) -> SoftPrediction {
    let d = 1.0 - g;
    let lo = (1.0 + 2.0 * d) / 3.0;
    let hi = (1.0 + d) / 2.0;
    let a = lo + u * (hi - lo);
    let third = (1.0 - 2.0 * a + d).max(0.0);
    let second = a - d;
    let sum = a + second + third;
    SoftPrediction::new(vec![a / sum, second / sum, third / sum])
        .expect("construction keeps entries non-negative")
}

/// Fixed mask (true = correct) for worlds that do not react to the strategy.
pub fn oblivious_mask<R: Rng + ?Sized>(
    world: WorldKind,
    gains: &[f64],
    m: f64,
    rng: &mut R,
) -> Option<Vec<bool>> {
    let n = gains.len();
    match world {
        WorldKind::AdversarialTopGain => {
            let count = mistake_count(m, rng).min(n);
            let mut mask = vec![true; n];
            for &i in descending_order(gains).iter().take(count) {
                mask[i] = false;
            }
            Some(mask)
        }
        WorldKind::Iid { rate } => Some((0..n).map(|_| rng.random::<f64>() >= rate).collect()),
        WorldKind::GainCorrelated { slope } => Some(
            gains
                .iter()
                .map(|g| rng.random::<f64>() >= (slope * g).clamp(0.0, 1.0))
                .collect(),
        ),
        WorldKind::AdversarialVsP => None,
    }
}

/// `floor(m)` mistakes plus one more with probability `frac(m)`.
pub fn mistake_count<R: Rng + ?Sized>(m: f64, rng: &mut R) -> usize {
    let whole = math::floor(m.max(0.0));
    let extra = usize::from(rng.random::<f64>() < m - whole);
    whole as usize + extra
}

/// Worst-case mask against a single-pick distribution: mislabel the
/// `mistake_count(m)` points with the largest `p_i (g_i + l_i)`, lower index
/// first among ties.
pub fn adversarial_mask_vs_p<R: Rng + ?Sized>(
    gains: &[f64],
    losses: &[f64],
    p: &[f64],
    m: f64,
    rng: &mut R,
) -> Vec<bool> {
    let weight: Vec<f64> = p
        .iter()
        .zip(gains.iter().zip(losses))
        .map(|(pi, (g, l))| pi * (g + l))
        .collect();
    let count = mistake_count(m, rng).min(gains.len());
    let mut mask = vec![true; gains.len()];
    for &i in descending_order(&weight).iter().take(count) {
        mask[i] = false;
    }
    mask
}

/// Monte-Carlo mean and standard error of the single-pick payoff when one
/// index is drawn from `p` per trial.
pub fn sample_single_pick_payoffs(
    gains: &[f64],
    losses: &[f64],
    p: &[f64],
    mask: &[bool],
    draws: usize,
    seed: u64,
) -> (f64, f64) {
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &pi in p {
        acc += pi;
        cdf.push(acc);
    }
    let mut rng = rng::seeded(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let u = rng.random::<f64>() * acc;
        let mut i = cdf.partition_point(|&c| c <= u).min(p.len() - 1);
        // Skip zero-probability entries that share a cdf value.
        while p[i] == 0.0 && i + 1 < p.len() {
            i += 1;
        }
        let v = if mask[i] { gains[i] } else { -losses[i] };
        sum += v;
        sum_sq += v * v;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, math::sqrt(var / n))
}

fn validate(config: &GameConfig) -> Result<f64> {
    if config.n == 0 || config.b == 0 {
        return Err(Error::ConfigError("n and b must be positive".into()));
    }
    if !(config.m >= 0.0 && config.m < config.n as f64) {
        return Err(Error::ConfigError(alloc::format!(
            "m = {} must lie in [0, n)",
            config.m
        )));
    }
    if config.strategies.is_empty() || config.seeds.is_empty() {
        return Err(Error::ConfigError("need at least one strategy and one seed".into()));
    }
    if config.b * config.rounds > config.n {
        return Err(Error::BudgetExhausted {
            available: config.n,
            requested: config.b * config.rounds,
        });
    }
    let w = match config.loss {
        GameLoss::Zero => 0.0,
        GameLoss::Relative(w) => w,
        GameLoss::RelativeDefault => 1.0 - config.m / config.n as f64,
    };
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidWeight(w));
    }
    Ok(w)
}

/// Runs every strategy on every seed.
pub fn run_game(config: &GameConfig) -> Result<GameTrace> {
    let w = validate(config)?;
    let mut rounds = Vec::new();
    let mut finals: Vec<Vec<f64>> = vec![Vec::new(); config.strategies.len()];
    let mut firsts: Vec<Vec<f64>> = vec![Vec::new(); config.strategies.len()];

    for &seed in &config.seeds {
        let pool = draw_pool(config.n, &mut rng::stream(seed, 0));
        let losses: Vec<f64> = pool.gains.iter().map(|g| w * g).collect();
        let fixed_mask = oblivious_mask(config.world, &pool.gains, config.m, &mut rng::stream(seed, 1));

        for (s_idx, &kind) in config.strategies.iter().enumerate() {
            let mut rng = rng::stream(seed, 2 + s_idx as u64);
            let mut remaining: Vec<usize> = (0..config.n).collect();
            let mut cumulative = 0.0;
            for round in 0..config.rounds {
                let record = play_round(
                    config,
                    kind,
                    &pool,
                    &losses,
                    fixed_mask.as_deref(),
                    &mut remaining,
                    &mut rng,
                )?;
                cumulative += record.0;
                if round == 0 {
                    firsts[s_idx].push(record.0);
                }
                rounds.push(RoundRecord {
                    seed,
                    strategy: kind.label(),
                    round,
                    selected: record.1,
                    mislabeled: record.2,
                    realized_gain: record.0,
                    cumulative_gain: cumulative,
                    opt_value: record.3,
                });
            }
            finals[s_idx].push(cumulative);
        }
    }

    let summaries = config
        .strategies
        .iter()
        .enumerate()
        .map(|(i, kind)| {
            let (mean, se) = mean_and_se(&finals[i]);
            StrategySummary {
                strategy: kind.label(),
                mean_cumulative_gain: mean,
                std_error: se,
                mean_first_round_gain: mean_and_se(&firsts[i]).0,
                per_seed: finals[i].clone(),
            }
        })
        .collect();
    Ok(GameTrace { rounds, summaries })
}

type RoundOutcome = (f64, Vec<usize>, usize, Option<f64>);

fn play_round<R: Rng + ?Sized>(
    config: &GameConfig,
    kind: StrategyKind,
    pool: &GamePool,
    losses: &[f64],
    fixed_mask: Option<&[bool]>,
    remaining: &mut Vec<usize>,
    rng: &mut R,
) -> Result<RoundOutcome> {
    if remaining.len() < config.b {
        return Err(Error::BudgetExhausted {
            available: remaining.len(),
            requested: config.b,
        });
    }
    let gains: Vec<f64> = remaining.iter().map(|&i| pool.gains[i]).collect();
    let entropies: Vec<f64> = remaining.iter().map(|&i| pool.entropies[i]).collect();
    let local_losses: Vec<f64> = remaining.iter().map(|&i| losses[i]).collect();
    let local_fixed: Option<Vec<bool>> = fixed_mask.map(|mask| remaining.iter().map(|&i| mask[i]).collect());

    // RAD knows how many pool points are mislabeled, never which ones.
    let m_pool = match &local_fixed {
        Some(mask) => mask.iter().filter(|c| !**c).count() as f64,
        None => config.m.min(remaining.len() as f64 - 1.0),
    };
    let view = SelectionView {
        gains: &gains,
        entropies: &entropies,
        m: m_pool,
    };

    let (selection, mask) = match local_fixed {
        Some(mask) => {
            let oracle_mask = kind.reads_mask().then_some(mask.as_slice());
            (select(kind, &view, oracle_mask, config.b, rng)?, mask)
        }
        None => {
            // The adversary moves after seeing the strategy's distribution.
            // Deterministic strategies expose the uniform distribution over
            // their picks; the oracle is scored against a uniform-p adversary.
            let n_pool = gains.len();
            if kind.reads_mask() {
                let uniform = vec![1.0 / n_pool as f64; n_pool];
                let mask = adversarial_mask_vs_p(&gains, &local_losses, &uniform, config.m, rng);
                (select(kind, &view, Some(&mask), config.b, rng)?, mask)
            } else {
                let selection = select(kind, &view, None, config.b, rng)?;
                let p = match &selection.distribution {
                    Some(p) => p.clone(),
                    None => {
                        let mut p = vec![0.0; n_pool];
                        let share = 1.0 / selection.indices.len().max(1) as f64;
                        for &i in &selection.indices {
                            p[i] = share;
                        }
                        p
                    }
                };
                let mask = adversarial_mask_vs_p(&gains, &local_losses, &p, config.m, rng);
                (selection, mask)
            }
        }
    };

    let gain = realized_gain(&gains, &local_losses, &mask, &selection.indices);
    let mislabeled = selection.indices.iter().filter(|&&i| !mask[i]).count();
    let selected: Vec<usize> = selection.indices.iter().map(|&i| remaining[i]).collect();
    let mut keep = vec![true; remaining.len()];
    for &i in &selection.indices {
        keep[i] = false;
    }
    let mut k = 0;
    remaining.retain(|_| {
        let r = keep[k];
        k += 1;
        r
    });
    Ok((gain, selected, mislabeled, selection.opt_value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::expected_payoff;
    use crate::solver::{solve_relative, LossModel, RobustInstance};

    fn config(world: WorldKind, strategies: Vec<StrategyKind>) -> GameConfig {
        GameConfig {
            n: 200,
            m: 20.0,
            loss: GameLoss::RelativeDefault,
            b: 10,
            rounds: 3,
            world,
            strategies,
            seeds: vec![1, 2, 3],
        }
    }

    #[test]
    fn predictions_match_gain() {
        for &(g, u) in &[(0.1, 0.0), (0.5, 0.5), (0.99, 0.9), (0.3, 0.999)] {
            let p = prediction_with_gain(g, u);
            assert!((crate::gains::margin_gain(&p).unwrap() - g).abs() < 1e-12);
        }
    }

    #[test]
    fn clean_world_pays_selected_gains() {
        let cfg = config(
            WorldKind::Iid { rate: 0.0 },
            vec![StrategyKind::Uniform, StrategyKind::Rad { w: None }, StrategyKind::MarginGreedy],
        );
        let trace = run_game(&cfg).unwrap();
        for r in &trace.rounds {
            let pool = draw_pool(cfg.n, &mut rng::stream(r.seed, 0));
            let expected: f64 = r.selected.iter().map(|&i| pool.gains[i]).sum();
            assert!((r.realized_gain - expected).abs() < 1e-12);
            assert_eq!(r.mislabeled, 0);
        }
    }

    #[test]
    fn greedy_hits_every_mistake_under_top_gain_adversary() {
        let mut cfg = config(WorldKind::AdversarialTopGain, vec![StrategyKind::MarginGreedy]);
        cfg.b = 20;
        cfg.rounds = 1;
        let trace = run_game(&cfg).unwrap();
        for r in &trace.rounds {
            let pool = draw_pool(cfg.n, &mut rng::stream(r.seed, 0));
            let w = 1.0 - cfg.m / cfg.n as f64;
            let expected: f64 = r.selected.iter().map(|&i| -w * pool.gains[i]).sum();
            assert_eq!(r.mislabeled, 20);
            assert!((r.realized_gain - expected).abs() < 1e-12);
            assert!(r.realized_gain < 0.0);
        }
    }

    #[test]
    fn selected_points_leave_the_pool() {
        let cfg = config(
            WorldKind::GainCorrelated { slope: 0.3 },
            vec![StrategyKind::Uniform, StrategyKind::EntropyGreedy, StrategyKind::OracleRobust],
        );
        let trace = run_game(&cfg).unwrap();
        for seed in &cfg.seeds {
            for kind in &cfg.strategies {
                let mut seen = alloc::collections::BTreeSet::new();
                for r in trace.rounds.iter().filter(|r| r.seed == *seed && r.strategy == kind.label()) {
                    assert_eq!(r.selected.len(), cfg.b);
                    for &i in &r.selected {
                        assert!(seen.insert(i));
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_takes_best_correct_points() {
        let mut cfg = config(WorldKind::Iid { rate: 0.3 }, vec![StrategyKind::OracleRobust]);
        cfg.rounds = 1;
        let trace = run_game(&cfg).unwrap();
        for r in &trace.rounds {
            let pool = draw_pool(cfg.n, &mut rng::stream(r.seed, 0));
            let mask = oblivious_mask(cfg.world, &pool.gains, cfg.m, &mut rng::stream(r.seed, 1)).unwrap();
            let mut correct: Vec<f64> = pool.gains.iter().zip(&mask).filter(|(_, c)| **c).map(|(g, _)| *g).collect();
            correct.sort_by(|a, b| b.total_cmp(a));
            let best: f64 = correct[..cfg.b].iter().sum();
            assert!((r.realized_gain - best).abs() < 1e-12);
        }
    }

    #[test]
    fn rad_meets_value_against_reactive_adversary() {
        let gains: Vec<f64> = (0..40).map(|i| 0.05 + 0.023 * i as f64).collect();
        let m = 6.0;
        let w = 1.0 - m / 40.0;
        let sol = solve_relative(&gains, m, w).unwrap();
        let losses: Vec<f64> = gains.iter().map(|g| w * g).collect();
        let mask = adversarial_mask_vs_p(&gains, &losses, &sol.probs, m, &mut rng::seeded(0));
        let analytic = expected_payoff(&gains, &losses, &sol.probs, &mask);
        assert!(analytic >= sol.opt_value - 1e-12);
        let inst = RobustInstance::new(&gains, LossModel::Relative(w), m).unwrap();
        assert!((crate::solver::game_value(&inst, &sol.probs).unwrap() - analytic).abs() < 1e-12);
        let (mean, se) = sample_single_pick_payoffs(&gains, &losses, &sol.probs, &mask, 20_000, 5);
        assert!((mean - analytic).abs() <= 4.0 * se);
    }

    #[test]
    fn config_errors() {
        let mut cfg = config(WorldKind::AdversarialTopGain, vec![StrategyKind::Uniform]);
        cfg.rounds = 100;
        assert!(matches!(run_game(&cfg), Err(Error::BudgetExhausted { .. })));
        cfg.rounds = 1;
        cfg.m = 500.0;
        assert!(matches!(run_game(&cfg), Err(Error::ConfigError(_))));
        cfg.m = 1.0;
        cfg.seeds.clear();
        assert!(matches!(run_game(&cfg), Err(Error::ConfigError(_))));
    }

    #[test]
    fn fractional_mistakes() {
        let mut rng = rng::seeded(11);
        let draws = 20_000;
        let total: usize = (0..draws).map(|_| mistake_count(2.25, &mut rng)).sum();
        let mean = total as f64 / draws as f64;
        assert!((mean - 2.25).abs() < 0.02);
    }
}
