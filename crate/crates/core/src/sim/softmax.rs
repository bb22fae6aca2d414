//! Multinomial logistic regression trained by full-batch gradient descent.
//!
//! Targets are class distributions (one-hot for hard labels); the loss is the
//! mean cross-entropy to those targets, which differs from the KL divergence
//! only by the targets' own entropy.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gains::SoftPrediction;
use crate::math;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Wraps row-major `data`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Empty matrix with `cols` columns.
    pub fn empty(cols: usize) -> Self {
        Self {
            rows: 0,
            cols,
            data: Vec::new(),
        }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Appends a row.
    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.cols, "row length");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// New matrix made of the listed rows.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut out = Self::empty(self.cols);
        for &r in rows {
            out.push_row(self.row(r));
        }
        out
    }
}

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    /// Step size.
    pub learning_rate: f64,
    /// Passes over the data.
    pub epochs: usize,
    /// Mini-batch size; `None` trains on the full batch.
    #[cfg_attr(feature = "serde", serde(default))]
    pub batch_size: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 200,
            batch_size: None,
        }
    }
}

/// Linear softmax classifier with a bias column.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxModel {
    classes: usize,
    dim: usize,
    /// `classes x (dim + 1)`, row-major; the last column is the bias.
    weights: Vec<f64>,
    /// Training loss after each epoch.
    pub loss_history: Vec<f64>,
}

impl SoftmaxModel {
    /// All-zero model (uniform predictions).
    pub fn zeros(classes: usize, dim: usize) -> Self {
        Self {
            classes,
            dim,
            weights: vec![0.0; classes * (dim + 1)],
            loss_history: Vec::new(),
        }
    }

    /// Model with the given weights.
    pub fn from_weights(classes: usize, dim: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != classes * (dim + 1) {
            return Err(Error::DimensionMismatch {
                expected: classes * (dim + 1),
                got: weights.len(),
            });
        }
        Ok(Self {
            classes,
            dim,
            weights,
            loss_history: Vec::new(),
        })
    }

    /// Weight vector.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of classes.
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Class probabilities for one input.
    pub fn predict_one(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.classes];
        probabilities(&self.weights, self.classes, x, &mut out);
        out
    }

    /// Validated prediction for one input.
    pub fn predict(&self, x: &[f64]) -> SoftPrediction {
        SoftPrediction::new(self.predict_one(x)).expect("softmax output is normalized")
    }

    /// Most probable class for one input.
    pub fn classify(&self, x: &[f64]) -> usize {
        crate::gains::argmax(&self.predict_one(x))
    }

    /// Fraction of rows classified as their label.
    pub fn accuracy(&self, x: &Matrix, labels: &[usize]) -> f64 {
        if labels.is_empty() {
            return 0.0;
        }
        let hits = (0..x.rows()).filter(|&i| self.classify(x.row(i)) == labels[i]).count();
        hits as f64 / labels.len() as f64
    }
}

fn probabilities(weights: &[f64], classes: usize, x: &[f64], out: &mut [f64]) {
    let stride = x.len() + 1;
    let mut max = f64::NEG_INFINITY;
    for (c, o) in out.iter_mut().enumerate().take(classes) {
        let row = &weights[c * stride..(c + 1) * stride];
        let z = row[..x.len()].iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + row[x.len()];
        *o = z;
        max = max.max(z);
    }
    let mut sum = 0.0;
    for o in out.iter_mut() {
        *o = math::exp(*o - max);
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Mean cross-entropy of `weights` on `(x, targets)` and its gradient.
pub fn loss_and_gradient(
    weights: &[f64],
    classes: usize,
    x: &Matrix,
    targets: &Matrix,
) -> (f64, Vec<f64>) {
    loss_and_gradient_rows(weights, classes, x, targets, 0..x.rows())
}

fn loss_and_gradient_rows(
    weights: &[f64],
    classes: usize,
    x: &Matrix,
    targets: &Matrix,
    rows: core::ops::Range<usize>,
) -> (f64, Vec<f64>) {
    let dim = x.cols();
    let stride = dim + 1;
    let mut grad = vec![0.0; weights.len()];
    let mut probs = vec![0.0; classes];
    let mut loss = 0.0;
    let count = rows.len().max(1) as f64;
    for i in rows {
        let xi = x.row(i);
        let ti = targets.row(i);
        probabilities(weights, classes, xi, &mut probs);
        for c in 0..classes {
            if ti[c] > 0.0 {
                loss -= ti[c] * math::ln(probs[c].max(1e-300));
            }
            let diff = probs[c] - ti[c];
            let g = &mut grad[c * stride..(c + 1) * stride];
            for (gj, xj) in g[..dim].iter_mut().zip(xi) {
                *gj += diff * xj;
            }
            g[dim] += diff;
        }
    }
    for g in &mut grad {
        *g /= count;
    }
    (loss / count, grad)
}

/// Trains from zero initialization.
pub fn train_softmax(
    x: &Matrix,
    targets: &Matrix,
    classes: usize,
    config: &TrainConfig,
) -> Result<SoftmaxModel> {
    if x.rows() == 0 {
        return Err(Error::ConfigError("no training data".into()));
    }
    if targets.rows() != x.rows() || targets.cols() != classes || classes < 2 {
        return Err(Error::ConfigError("targets do not match inputs and classes".into()));
    }
    if !(config.learning_rate > 0.0) || config.batch_size == Some(0) {
        return Err(Error::ConfigError("learning rate and batch size must be positive".into()));
    }
    for i in 0..targets.rows() {
        let row = targets.row(i);
        let sum: f64 = row.iter().sum();
        if row.iter().any(|t| *t < 0.0 || !t.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(sum));
        }
    }
    let mut model = SoftmaxModel::zeros(classes, x.cols());
    let batch = config.batch_size.unwrap_or(x.rows()).min(x.rows());
    for epoch in 0..config.epochs {
        let mut start = 0;
        while start < x.rows() {
            let end = (start + batch).min(x.rows());
            let (_, grad) = loss_and_gradient_rows(&model.weights, classes, x, targets, start..end);
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= config.learning_rate * g;
            }
            start = end;
        }
        let (loss, _) = loss_and_gradient(&model.weights, classes, x, targets);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss(epoch));
        }
        model.loss_history.push(loss);
    }
    Ok(model)
}

/// One-hot encoding of hard labels.
pub fn one_hot(labels: &[usize], classes: usize) -> Matrix {
    let mut data = vec![0.0; labels.len() * classes];
    for (i, &l) in labels.iter().enumerate() {
        data[i * classes + l] = 1.0;
    }
    Matrix {
        rows: labels.len(),
        cols: classes,
        data,
    }
}
