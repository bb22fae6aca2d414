//! Informativeness scores from a student's predictive distribution.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

const NORM_TOL: f64 = 1e-9;

/// A validated class-probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftPrediction(Vec<f64>);

impl SoftPrediction {
    /// Validates non-negativity and normalization (within `1e-9`).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Self(probs))
    }

    /// Class probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// Number of classes.
    pub fn classes(&self) -> usize {
        self.0.len()
    }

    /// Index of the most probable class (first on ties).
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Difference between the two largest class probabilities.
pub fn margin(pred: &SoftPrediction) -> Result<f64> {
    let probs = pred.probs();
    if probs.len() < 2 {
        return Err(Error::TooFewClasses(probs.len()));
    }
    let (mut top, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &p in probs {
        if p > top {
            second = top;
            top = p;
        } else if p > second {
            second = p;
        }
    }
    Ok((top - second).clamp(0.0, 1.0))
}

/// `1 - margin`.
pub fn margin_gain(pred: &SoftPrediction) -> Result<f64> {
    margin(pred).map(|m| 1.0 - m)
}

/// Shannon entropy in nats, with `0 log 0 = 0`.
pub fn entropy_gain(pred: &SoftPrediction) -> f64 {
    pred.probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * math::ln(p))
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pred(v: &[f64]) -> SoftPrediction {
        SoftPrediction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn one_hot_and_uniform() {
        let hot = pred(&[1.0, 0.0, 0.0]);
        assert_eq!(margin(&hot).unwrap(), 1.0);
        assert_eq!(margin_gain(&hot).unwrap(), 0.0);
        assert_eq!(entropy_gain(&hot), 0.0);

        for k in 2..8 {
            let u = pred(&vec![1.0 / k as f64; k]);
            assert!(margin(&u).unwrap().abs() < 1e-15);
            assert!((margin_gain(&u).unwrap() - 1.0).abs() < 1e-15);
            assert!((entropy_gain(&u) - math::ln(k as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn three_class_example() {
        let p = pred(&[0.5, 0.3, 0.2]);
        assert!((margin(&p).unwrap() - 0.2).abs() < 1e-15);
        assert!((margin_gain(&p).unwrap() - 0.8).abs() < 1e-15);
        // Cross-check by sorting.
        let mut s = p.probs().to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(margin(&p).unwrap(), s[0] - s[1]);
        assert!((entropy_gain(&pred(&[0.5, 0.5])) - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(SoftPrediction::new(vec![0.5, 0.4]), Err(Error::NotNormalized(_))));
        assert!(matches!(SoftPrediction::new(vec![1.2, -0.2]), Err(Error::NotNormalized(_))));
        assert_eq!(margin(&pred(&[1.0])), Err(Error::TooFewClasses(1)));
    }

    #[test]
    fn argmax_prefers_first_on_ties() {
        assert_eq!(pred(&[0.4, 0.4, 0.2]).argmax(), 0);
        assert_eq!(pred(&[0.1, 0.2, 0.7]).argmax(), 2);
    }
}
