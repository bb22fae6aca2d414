use rad_core::sim::distill::{run_experiment, DistillConfig, DistillOptions, TaskConfig};
use rad_core::sim::softmax::TrainConfig;
use rad_core::sim::StrategyKind;

fn low_noise() -> DistillConfig {
    DistillConfig {
        task: TaskConfig {
            classes: 4,
            dim: 4,
            separation: 6.0,
            spread: 0.0,
            overlap: 0.0,
            n_labeled: 60,
            n_pool: 1000,
            n_validation: 300,
            n_test: 1000,
        },
        options: DistillOptions {
            student: TrainConfig {
                epochs: 100,
                ..TrainConfig::default()
            },
            ..DistillOptions::default()
        },
        iterations: 3,
        b: 100,
        strategies: vec![StrategyKind::Uniform, StrategyKind::Rad { w: None }],
        seeds: (0..20).collect(),
    }
}

#[test]
fn accurate_teacher_makes_strategies_tie() {
    let report = run_experiment(&low_noise()).unwrap();
    let teacher: f64 = report.traces.iter().map(|t| t.teacher_test_accuracy).sum::<f64>() / report.traces.len() as f64;
    assert!(teacher > 0.98, "teacher accuracy {teacher}");
    let u = report.summary("uniform").unwrap();
    let r = report.summary("rad").unwrap();
    // Overlapping one-SE intervals.
    assert!(
        (u.mean_final_accuracy - r.mean_final_accuracy).abs() <= u.std_error + r.std_error + 1e-12,
        "uniform {} +- {}, rad {} +- {}",
        u.mean_final_accuracy,
        u.std_error,
        r.mean_final_accuracy,
        r.std_error
    );
}

#[test]
fn queried_counts_respect_the_budget() {
    let mut config = low_noise();
    config.seeds = vec![1];
    config.strategies = vec![StrategyKind::MarginGreedy, StrategyKind::EntropyGreedy, StrategyKind::OracleRobust];
    let report = run_experiment(&config).unwrap();
    for t in &report.traces {
        let last = t.iterations.last().unwrap();
        assert!(last.cumulative_queried <= config.iterations * config.b);
        assert!(t.iterations.iter().all(|r| (0.0..=1.0).contains(&r.test_accuracy)));
    }
}

#[test]
fn robust_expectation_stays_near_its_value() {
    use rad_core::sim::distill::{generate_task, run_distillation};
    let options = DistillOptions::default();
    for seed in 0..3 {
        let task = generate_task(&TaskConfig::default(), seed).unwrap();
        let trace = run_distillation(&task, StrategyKind::Rad { w: None }, 5, 200, &options).unwrap();
        for r in &trace.iterations[1..] {
            let (opt, expected) = (r.opt_value.unwrap(), r.expected_gain.unwrap());
            assert!(expected >= opt - 3.0 * r.realized_gain_se, "iteration {}: {expected} < {opt} - 3 * {}", r.iteration, r.realized_gain_se);
        }
    }
}
