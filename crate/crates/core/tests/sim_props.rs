use proptest::prelude::*;
use rad_core::rng;
use rad_core::sim::game::{adversarial_mask_vs_p, run_game, GameConfig, GameLoss, WorldKind};
use rad_core::sim::softmax::{loss_and_gradient, one_hot, train_softmax, Matrix, SoftmaxModel, TrainConfig};
use rad_core::sim::{expected_payoff, select, SelectionView, StrategyKind};
use rad_core::solver::{default_w, solve_relative};
use rand::Rng;

fn data(rows: usize, cols: usize, classes: usize, seed: u64) -> (Matrix, Matrix) {
    let mut r = rng::seeded(seed);
    let x = Matrix::new(rows, cols, (0..rows * cols).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
    let mut t = Matrix::empty(classes);
    for _ in 0..rows {
        let raw: Vec<f64> = (0..classes).map(|_| r.random::<f64>() + 0.01).collect();
        let s: f64 = raw.iter().sum();
        t.push_row(&raw.iter().map(|v| v / s).collect::<Vec<_>>());
    }
    (x, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), classes in 2usize..5, cols in 1usize..5) {
        let (x, t) = data(12, cols, classes, seed);
        let mut r = rng::seeded(seed ^ 1);
        let w: Vec<f64> = (0..classes * (cols + 1)).map(|_| r.random_range(-1.0..1.0)).collect();
        let (_, grad) = loss_and_gradient(&w, classes, &x, &t);
        let h = 1e-5;
        for j in 0..w.len() {
            let mut up = w.clone();
            up[j] += h;
            let mut down = w.clone();
            down[j] -= h;
            let numeric = (loss_and_gradient(&up, classes, &x, &t).0 - loss_and_gradient(&down, classes, &x, &t).0) / (2.0 * h);
            prop_assert!((numeric - grad[j]).abs() <= 1e-5 * numeric.abs().max(grad[j].abs()).max(1e-3));
        }
    }

    #[test]
    fn predictions_are_distributions(seed in any::<u64>(), classes in 2usize..6) {
        let (x, t) = data(20, 3, classes, seed);
        let model = train_softmax(&x, &t, classes, &TrainConfig { epochs: 30, ..TrainConfig::default() }).unwrap();
        for i in 0..x.rows() {
            let p = model.predict_one(x.row(i));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn only_the_oracle_reads_the_mask(seed in any::<u64>(), b in 1usize..20, m in 0.0f64..30.0) {
        let mut r = rng::seeded(seed);
        let gains: Vec<f64> = (0..40).map(|_| r.random_range(0.01..1.0)).collect();
        let entropies: Vec<f64> = (0..40).map(|_| r.random_range(0.0..1.0)).collect();
        let mask: Vec<bool> = (0..40).map(|_| r.random::<bool>()).collect();
        let view = SelectionView { gains: &gains, entropies: &entropies, m };
        for kind in [StrategyKind::Uniform, StrategyKind::MarginGreedy, StrategyKind::EntropyGreedy, StrategyKind::Rad { w: None }] {
            let with = select(kind, &view, Some(&mask), b, &mut rng::seeded(seed)).unwrap();
            let without = select(kind, &view, None, b, &mut rng::seeded(seed)).unwrap();
            prop_assert_eq!(with, without);
        }
    }

    #[test]
    fn robust_distribution_survives_its_best_response(seed in any::<u64>(), n in 2usize..200, frac in 0.0f64..1.0) {
        let mut r = rng::seeded(seed);
        let gains: Vec<f64> = (0..n).map(|_| r.random_range(0.01..1.0)).collect();
        let m = (frac * (n as f64 - 1.0)).floor();
        let w = default_w(m, n).unwrap();
        let losses: Vec<f64> = gains.iter().map(|g| w * g).collect();
        let sol = solve_relative(&gains, m, w).unwrap();
        let mask = adversarial_mask_vs_p(&gains, &losses, &sol.probs, m, &mut r);
        let payoff = expected_payoff(&gains, &losses, &sol.probs, &mask);
        prop_assert!(payoff >= sol.opt_value - 1e-10 * sol.opt_value.abs().max(1.0));
    }
}

#[test]
fn softmax_zero_model_is_uniform() {
    let m = SoftmaxModel::zeros(4, 3);
    assert_eq!(m.predict_one(&[1.0, -2.0, 0.5]), vec![0.25; 4]);
    let (x, _) = data(5, 3, 4, 0);
    let t = one_hot(&[0, 1, 2, 3, 0], 4);
    let (loss, _) = loss_and_gradient(m.weights(), 4, &x, &t);
    assert!((loss - 4f64.ln()).abs() < 1e-12);
}

#[test]
fn game_runs_replay() {
    let config = GameConfig {
        n: 300,
        m: 50.0,
        loss: GameLoss::RelativeDefault,
        b: 20,
        rounds: 4,
        world: WorldKind::GainCorrelated { slope: 0.4 },
        strategies: vec![StrategyKind::Uniform, StrategyKind::Rad { w: None }, StrategyKind::OracleRobust],
        seeds: vec![3, 4],
    };
    let a = run_game(&config).unwrap();
    assert_eq!(a, run_game(&config).unwrap());
    // The oracle never picks a mislabeled point.
    assert!(a.rounds.iter().filter(|r| r.strategy == "oracle_robust").all(|r| r.mislabeled == 0));
}
