//! Active distillation on synthetic data.
//!
//! A teacher is trained once on the labeled split. Each iteration the
//! student scores the remaining unlabeled pool, a strategy picks `b` points,
//! the teacher's soft labels for them are added to the student's training
//! set, and the student is retrained from scratch.
//!
//! Data are isotropic Gaussian blobs with class means at `+-separation` along
//! the coordinate axes. The teacher differs from the student in three ways:
//! it sees every labeled point (the student may be restricted to a
//! subsample), it adds `dim` fixed random quadratic features `(u_j . x)^2`,
//! and it trains for more epochs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::softmax::{one_hot, train_softmax, Matrix, SoftmaxModel, TrainConfig};
use super::{expected_payoff, fnv1a, mean_and_se, realized_gain, select, SelectionView, StrategyKind};
use crate::error::{Error, Result};
use crate::estimation::{bootstrap_budget, estimate_from_counts, BoundMode};
use crate::gains::{entropy_gain, margin_gain};
use crate::math;
use crate::rng;
use crate::solver::default_w;

/// Shape and difficulty of the synthetic task.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TaskConfig {
    /// Number of classes (at most `2 * dim`).
    pub classes: usize,
    /// Input dimension.
    pub dim: usize,
    /// Distance of each class mean from the origin.
    pub separation: f64,
    /// Class `c` has standard deviation `1 + spread * c / (classes - 1)`;
    /// zero gives identical isotropic blobs.
    pub spread: f64,
    /// Fraction of each class drawn from a shared blob at the origin instead
    /// of the class mean.
    pub overlap: f64,
    /// Labeled split size.
    pub n_labeled: usize,
    /// Unlabeled pool size.
    pub n_pool: usize,
    /// Validation split size (used to estimate the teacher's error).
    pub n_validation: usize,
    /// Test split size.
    pub n_test: usize,
}

/// Separation at which the default teacher is about 60% accurate, found with
/// [`calibrate_separation`] over seeds 0..8.
pub const SEPARATION_TEACHER_60: f64 = 5.5;

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            classes: 10,
            dim: 20,
            separation: SEPARATION_TEACHER_60,
            spread: 0.0,
            overlap: 0.3,
            n_labeled: 200,
            n_pool: 4000,
            n_validation: 1000,
            n_test: 2000,
        }
    }
}

/// One split of the task.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    /// Inputs.
    pub x: Matrix,
    /// Class indices.
    pub labels: Vec<usize>,
}

/// Generated dataset. Pool labels are private: only the scorer and the
/// oracle strategy reach them, through [`SyntheticTask::pool_groundtruth`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    config: TaskConfig,
    seed: u64,
    labeled: Split,
    pool_x: Matrix,
    pool_labels: Vec<usize>,
    validation: Split,
    test: Split,
}

impl SyntheticTask {
    /// Labeled split.
    pub fn labeled(&self) -> &Split {
        &self.labeled
    }

    /// Unlabeled pool inputs.
    pub fn pool(&self) -> &Matrix {
        &self.pool_x
    }

    /// Ground-truth labels of the pool; for scoring and the oracle only.
    pub fn pool_groundtruth(&self) -> &[usize] {
        &self.pool_labels
    }

    /// Validation split.
    pub fn validation(&self) -> &Split {
        &self.validation
    }

    /// Test split.
    pub fn test(&self) -> &Split {
        &self.test
    }

    /// Generation parameters.
    pub fn config(&self) -> &TaskConfig {
        &self.config
    }

    /// Generation seed.
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn class_mean(class: usize, dim: usize, separation: f64) -> (usize, f64) {
    if class < dim {
        (class, separation)
    } else {
        (class - dim, -separation)
    }
}

fn draw_split<R: Rng + ?Sized>(config: &TaskConfig, n: usize, rng: &mut R) -> Split {
    let mut x = Matrix::empty(config.dim);
    let mut labels = Vec::with_capacity(n);
    let mut row = vec![0.0; config.dim];
    for _ in 0..n {
        let class = rng.random_range(0..config.classes);
        let (axis, offset) = class_mean(class, config.dim, config.separation);
        let sd = 1.0 + config.spread * class as f64 / (config.classes - 1) as f64;
        for v in row.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *v = sd * z;
        }
        if rng.random::<f64>() >= config.overlap {
            row[axis] += offset;
        }
        x.push_row(&row);
        labels.push(class);
    }
    Split { x, labels }
}

/// Draws every split of the task from `seed`.
pub fn generate_task(config: &TaskConfig, seed: u64) -> Result<SyntheticTask> {
    if config.classes < 2 || config.dim < 2 {
        return Err(Error::ConfigError("need at least 2 classes and 2 dimensions".into()));
    }
    if config.classes > 2 * config.dim {
        return Err(Error::ConfigError(format!(
            "{} classes do not fit on the axes of a {}-dimensional space",
            config.classes, config.dim
        )));
    }
    if config.n_labeled == 0 || config.n_pool == 0 || config.n_validation == 0 || config.n_test == 0 {
        return Err(Error::ConfigError("every split needs at least one point".into()));
    }
    if !(config.separation >= 0.0) || !config.separation.is_finite() {
        return Err(Error::ConfigError("separation must be finite and non-negative".into()));
    }
    if !(0.0..=1.0).contains(&config.overlap) {
        return Err(Error::ConfigError("overlap must lie in [0, 1]".into()));
    }
    if !(config.spread >= 0.0) || !config.spread.is_finite() {
        return Err(Error::ConfigError("spread must be finite and non-negative".into()));
    }
    let mut rng = rng::stream(seed, 100);
    let labeled = draw_split(config, config.n_labeled, &mut rng);
    let pool = draw_split(config, config.n_pool, &mut rng);
    let validation = draw_split(config, config.n_validation, &mut rng);
    let test = draw_split(config, config.n_test, &mut rng);
    Ok(SyntheticTask {
        config: config.clone(),
        seed,
        labeled,
        pool_x: pool.x,
        pool_labels: pool.labels,
        validation,
        test,
    })
}

/// How the teacher is made stronger than the student.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TeacherConfig {
    /// Teacher epochs = student epochs times this.
    pub epoch_multiplier: usize,
    /// Add `dim` random quadratic features.
    pub quadratic_features: bool,
    /// Fraction of the labeled split the student trains on.
    pub student_labeled_fraction: f64,
}

impl Default for TeacherConfig {
    fn default() -> Self {
        Self {
            epoch_multiplier: 4,
            quadratic_features: true,
            student_labeled_fraction: 0.3,
        }
    }
}

/// Fixed feature map plus standardization, fitted on the labeled split.
#[derive(Debug, Clone, PartialEq)]
struct FeatureMap {
    projections: Vec<Vec<f64>>,
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl FeatureMap {
    fn fit(x: &Matrix, projections: Vec<Vec<f64>>) -> Self {
        let raw: Vec<Vec<f64>> = (0..x.rows()).map(|i| expand(&projections, x.row(i))).collect();
        let width = x.cols() + projections.len();
        let n = raw.len().max(1) as f64;
        let mut mean = vec![0.0; width];
        for r in &raw {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; width];
        for r in &raw {
            for ((s, v), m) in scale.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in &mut scale {
            *s = if *s > 1e-12 { math::sqrt(*s) } else { 1.0 };
        }
        Self {
            projections,
            mean,
            scale,
        }
    }

    fn apply_row(&self, x: &[f64]) -> Vec<f64> {
        let mut v = expand(&self.projections, x);
        for ((vi, m), s) in v.iter_mut().zip(&self.mean).zip(&self.scale) {
            *vi = (*vi - m) / s;
        }
        v
    }

    fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::empty(x.cols() + self.projections.len());
        for i in 0..x.rows() {
            out.push_row(&self.apply_row(x.row(i)));
        }
        out
    }
}

fn expand(projections: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    for u in projections {
        let dot: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
        v.push(dot * dot);
    }
    v
}

fn random_projections(dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::stream(seed, 200);
    (0..dim)
        .map(|_| {
            let u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = math::sqrt(u.iter().map(|v| v * v).sum::<f64>()).max(1e-12);
            u.into_iter().map(|v| v / norm).collect()
        })
        .collect()
}

/// A trained model together with its input transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    features: FeatureMap,
    model: SoftmaxModel,
}

impl Classifier {
    /// Class probabilities for a raw input.
    pub fn predict_one(&self, x: &[f64]) -> Vec<f64> {
        self.model.predict_one(&self.features.apply_row(x))
    }

    /// Most probable class for a raw input.
    pub fn classify(&self, x: &[f64]) -> usize {
        crate::gains::argmax(&self.predict_one(x))
    }

    /// Accuracy on a split.
    pub fn accuracy(&self, split: &Split) -> f64 {
        self.model.accuracy(&self.features.apply(&split.x), &split.labels)
    }

    /// Underlying softmax model.
    pub fn model(&self) -> &SoftmaxModel {
        &self.model
    }
}

fn fit_classifier(
    x: &Matrix,
    targets: &Matrix,
    classes: usize,
    projections: Vec<Vec<f64>>,
    fit_on: &Matrix,
    train: &TrainConfig,
) -> Result<Classifier> {
    let features = FeatureMap::fit(fit_on, projections);
    let model = train_softmax(&features.apply(x), targets, classes, train)?;
    Ok(Classifier { features, model })
}

/// Trains the teacher on the whole labeled split.
pub fn train_teacher(task: &SyntheticTask, student: &TrainConfig, teacher: &TeacherConfig) -> Result<Classifier> {
    let projections = if teacher.quadratic_features {
        random_projections(task.config.dim, task.seed)
    } else {
        Vec::new()
    };
    let train = TrainConfig {
        epochs: student.epochs * teacher.epoch_multiplier.max(1),
        ..*student
    };
    fit_classifier(
        &task.labeled.x,
        &one_hot(&task.labeled.labels, task.config.classes),
        task.config.classes,
        projections,
        &task.labeled.x,
        &train,
    )
}

/// Options for [`run_distillation`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DistillOptions {
    /// Student optimizer.
    pub student: TrainConfig,
    /// Teacher advantage.
    pub teacher: TeacherConfig,
    /// Uniform bootstrap sample taken by RAD in the first iteration;
    /// defaults to `max(100, ceil(0.1 b))`.
    pub b_uniform: Option<usize>,
    /// Failure probability reported with the mistake estimate.
    pub delta: f64,
    /// When the teacher's error rate is estimated.
    pub m_refresh: MRefresh,
}

/// When the teacher's error rate is estimated. The count passed to the
/// strategies is always that rate times the current pool size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MRefresh {
    /// Once, on the full validation split; the teacher never changes.
    #[default]
    Once,
    /// Every iteration, on a bootstrap resample of the validation split.
    PerIteration,
}

impl Default for DistillOptions {
    fn default() -> Self {
        Self {
            student: TrainConfig::default(),
            teacher: TeacherConfig::default(),
            b_uniform: None,
            delta: 0.05,
            m_refresh: MRefresh::Once,
        }
    }
}

/// One iteration of the loop; iteration 0 is the student trained on the
/// labeled split alone.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    /// Iteration number.
    pub iteration: usize,
    /// Points queried this iteration.
    pub queried: usize,
    /// Points queried so far.
    pub cumulative_queried: usize,
    /// Estimated teacher mistakes in the pool at selection time.
    pub m_hat: f64,
    /// Validation mistakes behind `m_hat`.
    pub validation_mistakes: usize,
    /// Student test accuracy after retraining.
    pub test_accuracy: f64,
    /// Payoff of the queried set against the teacher's true mistakes.
    pub realized_gain: f64,
    /// Standard error of the mean per-point payoff of the queried set.
    pub realized_gain_se: f64,
    /// Queried points the teacher mislabeled.
    pub mislabeled: usize,
    /// RAD's game value.
    pub opt_value: Option<f64>,
    /// RAD's single-pick expected payoff against the true mask.
    pub expected_gain: Option<f64>,
}

/// Full record of one strategy on one task.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistillTrace {
    /// Strategy label.
    pub strategy: String,
    /// Task seed.
    pub seed: u64,
    /// Fingerprint of task, options, strategy, `T` and `b`.
    pub config_hash: String,
    /// Teacher accuracy on the test split.
    pub teacher_test_accuracy: f64,
    /// Teacher error on the validation split.
    pub teacher_validation_error: f64,
    /// Pool points queried (ids into the pool), in query order.
    pub queried_ids: Vec<usize>,
    /// Per-iteration records.
    pub iterations: Vec<IterationRecord>,
}

impl DistillTrace {
    /// Test accuracy after the last iteration.
    pub fn final_accuracy(&self) -> f64 {
        self.iterations.last().map_or(f64::NAN, |r| r.test_accuracy)
    }
}

/// Runs `iterations` rounds of acquisition with `strategy`.
pub fn run_distillation(
    task: &SyntheticTask,
    strategy: StrategyKind,
    iterations: usize,
    b: usize,
    options: &DistillOptions,
) -> Result<DistillTrace> {
    if iterations * b > task.pool_x.rows() {
        return Err(Error::PoolExhausted {
            available: task.pool_x.rows(),
            requested: iterations * b,
        });
    }
    let classes = task.config.classes;
    let teacher = train_teacher(task, &options.student, &options.teacher)?;

    let validation_wrong: Vec<bool> = (0..task.validation.x.rows())
        .map(|i| teacher.classify(task.validation.x.row(i)) != task.validation.labels[i])
        .collect();
    let wrong = validation_wrong.iter().filter(|&&w| w).count();
    let err_rate = wrong as f64 / validation_wrong.len() as f64;
    let mut resample_rng = rng::stream(task.seed, 301);

    // Teacher correctness on the pool, hidden from non-oracle strategies.
    let mask: Vec<bool> = (0..task.pool_x.rows())
        .map(|i| teacher.classify(task.pool_x.row(i)) == task.pool_labels[i])
        .collect();

    let mut rng = rng::stream(task.seed, 300);
    let n_student = math::round(task.config.n_labeled as f64 * options.teacher.student_labeled_fraction)
        .clamp(1.0, task.config.n_labeled as f64) as usize;
    let mut student_rows: Vec<usize> = index::sample(&mut rng, task.config.n_labeled, n_student).into_vec();
    student_rows.sort_unstable();
    let mut train_x = task.labeled.x.select_rows(&student_rows);
    let labels: Vec<usize> = student_rows.iter().map(|&i| task.labeled.labels[i]).collect();
    let mut train_t = one_hot(&labels, classes);
    let labeled_x = train_x.clone();

    let fit_student = |x: &Matrix, t: &Matrix| fit_classifier(x, t, classes, Vec::new(), &labeled_x, &options.student);
    let mut student = fit_student(&train_x, &train_t)?;

    let config_hash = format!(
        "{:016x}",
        fnv1a(format!("{:?}|{:?}|{:?}|{}|{}|{}", task.config, options, strategy, iterations, b, task.seed).as_bytes())
    );
    let mut records = vec![IterationRecord {
        iteration: 0,
        queried: 0,
        cumulative_queried: 0,
        m_hat: err_rate * task.pool_x.rows() as f64,
        test_accuracy: student.accuracy(&task.test),
        realized_gain: 0.0,
        realized_gain_se: 0.0,
        validation_mistakes: wrong,
        mislabeled: 0,
        opt_value: None,
        expected_gain: None,
    }];
    let mut remaining: Vec<usize> = (0..task.pool_x.rows()).collect();
    let mut queried_ids = Vec::new();

    for iteration in 1..=iterations {
        let n_pool = remaining.len();
        let preds: Vec<_> = remaining.iter().map(|&i| student.model.predict(&student.features.apply_row(task.pool_x.row(i)))).collect();
        let gains: Vec<f64> = preds.iter().map(|p| margin_gain(p)).collect::<Result<_>>()?;
        let entropies: Vec<f64> = preds.iter().map(entropy_gain).collect();
        let k = validation_wrong.len();
        let wrong_now = match options.m_refresh {
            MRefresh::Once => wrong,
            MRefresh::PerIteration => (0..k)
                .filter(|_| validation_wrong[resample_rng.random_range(0..k)])
                .count(),
        };
        let m_hat = estimate_from_counts(wrong_now, k, n_pool, options.delta, BoundMode::PlugIn)?.m_hat;
        let w = default_w(m_hat.min(n_pool as f64 - 1.0), n_pool)?;
        let losses: Vec<f64> = gains.iter().map(|g| w * g).collect();
        let local_mask: Vec<bool> = remaining.iter().map(|&i| mask[i]).collect();

        let mut picked: Vec<usize> = Vec::with_capacity(b);
        let mut budget = b;
        if iteration == 1 && matches!(strategy, StrategyKind::Rad { .. }) {
            let boot = options.b_uniform.unwrap_or_else(|| bootstrap_budget(b)).min(b);
            picked.extend(index::sample(&mut rng, n_pool, boot).into_vec());
            budget -= boot;
        }
        let mut opt_value = None;
        let mut expected_gain = None;
        if budget > 0 {
            // Strategies choose among the points the bootstrap left.
            let mut taken = vec![false; n_pool];
            for &i in &picked {
                taken[i] = true;
            }
            let avail: Vec<usize> = (0..n_pool).filter(|&i| !taken[i]).collect();
            let sub_gains: Vec<f64> = avail.iter().map(|&i| gains[i]).collect();
            let sub_entropy: Vec<f64> = avail.iter().map(|&i| entropies[i]).collect();
            let sub_mask: Vec<bool> = avail.iter().map(|&i| local_mask[i]).collect();
            let view = SelectionView {
                gains: &sub_gains,
                entropies: &sub_entropy,
                m: m_hat * avail.len() as f64 / n_pool as f64,
            };
            let oracle_mask = strategy.reads_mask().then_some(sub_mask.as_slice());
            let selection = select(strategy, &view, oracle_mask, budget, &mut rng)?;
            if let (Some(p), Some(w_rad)) = (&selection.distribution, selection.w) {
                let sub_losses: Vec<f64> = sub_gains.iter().map(|g| w_rad * g).collect();
                expected_gain = Some(expected_payoff(&sub_gains, &sub_losses, p, &sub_mask));
                opt_value = selection.opt_value;
            }
            picked.extend(selection.indices.iter().map(|&i| avail[i]));
        }
        picked.sort_unstable();

        let gain = realized_gain(&gains, &losses, &local_mask, &picked);
        let payoffs: Vec<f64> = picked
            .iter()
            .map(|&i| if local_mask[i] { gains[i] } else { -losses[i] })
            .collect();
        let (_, gain_se) = mean_and_se(&payoffs);
        let mislabeled = picked.iter().filter(|&&i| !local_mask[i]).count();
        for &i in &picked {
            let id = remaining[i];
            train_x.push_row(task.pool_x.row(id));
            train_t.push_row(&teacher.predict_one(task.pool_x.row(id)));
            queried_ids.push(id);
        }
        let mut keep = vec![true; n_pool];
        for &i in &picked {
            keep[i] = false;
        }
        let mut k = 0;
        remaining.retain(|_| {
            let r = keep[k];
            k += 1;
            r
        });

        student = fit_student(&train_x, &train_t)?;
        records.push(IterationRecord {
            iteration,
            queried: picked.len(),
            cumulative_queried: queried_ids.len(),
            m_hat,
            test_accuracy: student.accuracy(&task.test),
            realized_gain: gain,
            realized_gain_se: if gain_se.is_finite() { gain_se } else { 0.0 },
            validation_mistakes: wrong_now,
            mislabeled,
            opt_value,
            expected_gain,
        });
    }

    Ok(DistillTrace {
        strategy: strategy.label(),
        seed: task.seed,
        config_hash,
        teacher_test_accuracy: teacher.accuracy(&task.test),
        teacher_validation_error: err_rate,
        queried_ids,
        iterations: records,
    })
}

/// A multi-seed, multi-strategy experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistillConfig {
    /// Task shape.
    #[cfg_attr(feature = "serde", serde(default))]
    pub task: TaskConfig,
    /// Loop options.
    #[cfg_attr(feature = "serde", serde(default))]
    pub options: DistillOptions,
    /// Number of acquisition iterations `T`.
    pub iterations: usize,
    /// Points per iteration `b`.
    pub b: usize,
    /// Strategies to compare.
    pub strategies: Vec<StrategyKind>,
    /// Task seeds.
    #[cfg_attr(feature = "serde", serde(default))]
    pub seeds: Vec<u64>,
}

/// Final-accuracy summary of one strategy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistillSummary {
    /// Strategy label.
    pub strategy: String,
    /// Mean final test accuracy.
    pub mean_final_accuracy: f64,
    /// Standard error of the final test accuracy.
    pub std_error: f64,
    /// Final accuracy per seed, in seed order.
    pub per_seed: Vec<f64>,
}

/// Traces and summaries of a [`DistillConfig`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistillReport {
    /// One trace per (seed, strategy), seed-major.
    pub traces: Vec<DistillTrace>,
    /// One summary per strategy.
    pub summaries: Vec<DistillSummary>,
}

impl DistillReport {
    /// Summary for a strategy label.
    pub fn summary(&self, label: &str) -> Option<&DistillSummary> {
        self.summaries.iter().find(|s| s.strategy == label)
    }
}

/// Runs every strategy on every seed's task.
pub fn run_experiment(config: &DistillConfig) -> Result<DistillReport> {
    if config.strategies.is_empty() || config.seeds.is_empty() {
        return Err(Error::ConfigError("need at least one strategy and one seed".into()));
    }
    let mut traces = Vec::new();
    let mut finals = vec![Vec::new(); config.strategies.len()];
    for &seed in &config.seeds {
        let task = generate_task(&config.task, seed)?;
        for (s, &kind) in config.strategies.iter().enumerate() {
            let trace = run_distillation(&task, kind, config.iterations, config.b, &config.options)?;
            finals[s].push(trace.final_accuracy());
            traces.push(trace);
        }
    }
    let summaries = config
        .strategies
        .iter()
        .zip(finals)
        .map(|(kind, per_seed)| {
            let (mean, se) = mean_and_se(&per_seed);
            DistillSummary {
                strategy: kind.label(),
                mean_final_accuracy: mean,
                std_error: se,
                per_seed,
            }
        })
        .collect();
    Ok(DistillReport { traces, summaries })
}

/// Mean teacher test accuracy over `seeds` for a given task configuration.
pub fn teacher_accuracy(task: &TaskConfig, options: &DistillOptions, seeds: &[u64]) -> Result<f64> {
    let mut total = 0.0;
    for &seed in seeds {
        let t = generate_task(task, seed)?;
        total += train_teacher(&t, &options.student, &options.teacher)?.accuracy(&t.test);
    }
    Ok(total / seeds.len().max(1) as f64)
}

/// Bisects the class separation until the mean teacher test accuracy over
/// `seeds` is within `tol` of `target`.
pub fn calibrate_separation(
    task: &TaskConfig,
    options: &DistillOptions,
    target: f64,
    seeds: &[u64],
    tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 8.0);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..40 {
        mid = 0.5 * (lo + hi);
        let acc = teacher_accuracy(&TaskConfig { separation: mid, ..task.clone() }, options, seeds)?;
        if (acc - target).abs() <= tol {
            return Ok(mid);
        }
        if acc < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_task() -> TaskConfig {
        TaskConfig {
            classes: 3,
            dim: 2,
            separation: 2.0,
            spread: 0.0,
            overlap: 0.0,
            n_labeled: 30,
            n_pool: 300,
            n_validation: 100,
            n_test: 200,
        }
    }

    fn quick_options() -> DistillOptions {
        DistillOptions {
            student: TrainConfig {
                epochs: 60,
                ..TrainConfig::default()
            },
            ..DistillOptions::default()
        }
    }

    #[test]
    fn task_replays_and_rejects_bad_configs() {
        let a = generate_task(&small_task(), 5).unwrap();
        let b = generate_task(&small_task(), 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_task(&small_task(), 6).unwrap());
        assert_eq!(a.pool().rows(), 300);
        assert!(generate_task(&TaskConfig { classes: 1, ..small_task() }, 0).is_err());
        assert!(generate_task(&TaskConfig { classes: 5, ..small_task() }, 0).is_err());
        assert!(generate_task(&TaskConfig { n_test: 0, ..small_task() }, 0).is_err());
    }

    #[test]
    fn far_apart_classes_are_easy() {
        let cfg = TaskConfig { separation: 12.0, ..small_task() };
        let acc = teacher_accuracy(&cfg, &quick_options(), &[0, 1]).unwrap();
        assert!(acc > 0.99, "{acc}");
    }

    #[test]
    fn zero_iterations_only_record_the_initial_student() {
        let task = generate_task(&small_task(), 1).unwrap();
        let trace = run_distillation(&task, StrategyKind::Uniform, 0, 10, &quick_options()).unwrap();
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(trace.iterations[0].queried, 0);
        assert!(trace.queried_ids.is_empty());
    }

    #[test]
    fn queried_sets_are_disjoint_and_sized() {
        let task = generate_task(&small_task(), 2).unwrap();
        for kind in [
            StrategyKind::Uniform,
            StrategyKind::MarginGreedy,
            StrategyKind::EntropyGreedy,
            StrategyKind::Rad { w: None },
            StrategyKind::OracleRobust,
        ] {
            let opts = DistillOptions { b_uniform: Some(5), ..quick_options() };
            let trace = run_distillation(&task, kind, 3, 20, &opts).unwrap();
            let mut ids = trace.queried_ids.clone();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), 60, "{}", trace.strategy);
            for r in &trace.iterations {
                assert!((0.0..=1.0).contains(&r.test_accuracy));
            }
            assert_eq!(trace.iterations.last().unwrap().cumulative_queried, 60);
        }
    }

    #[test]
    fn pool_exhaustion() {
        let task = generate_task(&small_task(), 3).unwrap();
        assert!(matches!(
            run_distillation(&task, StrategyKind::Uniform, 4, 100, &quick_options()),
            Err(Error::PoolExhausted { .. })
        ));
    }

    #[test]
    fn refreshed_estimates_vary_around_the_fixed_one() {
        let task = generate_task(&small_task(), 6).unwrap();
        let once = run_distillation(&task, StrategyKind::Uniform, 3, 20, &quick_options()).unwrap();
        let opts = DistillOptions {
            m_refresh: MRefresh::PerIteration,
            ..quick_options()
        };
        let fresh = run_distillation(&task, StrategyKind::Uniform, 3, 20, &opts).unwrap();
        let fixed = once.iterations[0].validation_mistakes;
        assert!(once.iterations.iter().all(|r| r.validation_mistakes == fixed));
        assert!(fresh.iterations[1..].iter().any(|r| r.validation_mistakes != fixed));
    }

    #[test]
    fn traces_are_deterministic() {
        let task = generate_task(&small_task(), 4).unwrap();
        let a = run_distillation(&task, StrategyKind::Rad { w: None }, 2, 20, &quick_options()).unwrap();
        let b = run_distillation(&task, StrategyKind::Rad { w: None }, 2, 20, &quick_options()).unwrap();
        assert_eq!(a, b);
    }
}
