//! Dual certificates for the robust sampling game.
//!
//! Given a claimed value `N` and support `S`, the adversary response
//!
//! ```text
//! c_i = (N + l_i) / (g_i + l_i)   for i in S,      c_i = 1 otherwise
//! ```
//!
//! makes every supported point pay exactly `N`. Against this fixed mask the
//! learner's best response is worth `max_i (c_i (g_i + l_i) - l_i)`, which by
//! weak duality upper-bounds the value of *every* distribution. When the
//! claimed distribution achieves that bound, it is optimal; no search is
//! involved.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::solver::{check_distribution, game_value, RobustInstance, SamplerSolution};

/// Adversary response plus the quantities that make it a proof.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualCertificate {
    /// Mask in caller order, clamped to `[0, 1]`. Ineligible points carry 1
    /// and do not count toward the mass.
    pub c_star: Vec<f64>,
    /// Best-response value of the learner against `c_star`.
    pub upper_bound: f64,
    /// `|sum(c_star) - (n - m)|` over eligible points.
    pub mass_residual: f64,
    /// `|upper_bound - opt_value|`.
    pub gap: f64,
    /// Largest amount any supported entry had to be moved by clamping.
    pub clamp_violation: f64,
}

/// Why a claimed solution could not be certified as feasible.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Infeasibility {
    /// The probabilities are not a distribution over eligible points.
    NotADistribution(alloc::string::String),
    /// The certificate formula left `[0, 1]` on the support.
    MaskOutOfRange(f64),
    /// The certificate mask does not have mass `n - m`.
    MassMismatch(f64),
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    /// Achieved value, certificate bound and claimed value all agree.
    Optimal,
    /// At least one side disagrees with the claimed value.
    Suboptimal {
        /// Worst-case value actually achieved by the probabilities.
        achieved: f64,
        /// Certificate upper bound.
        upper_bound: f64,
        /// `upper_bound - achieved`.
        gap: f64,
    },
    /// Feasibility check failed.
    Infeasible(Infeasibility),
}

impl Verdict {
    /// True for [`Verdict::Optimal`].
    pub fn is_optimal(&self) -> bool {
        matches!(self, Verdict::Optimal)
    }
}

/// Builds the adversary certificate for `solution`.
pub fn build_certificate(
    instance: &RobustInstance,
    solution: &SamplerSolution,
) -> Result<DualCertificate> {
    if solution.probs.len() != instance.total_len() {
        return Err(Error::DimensionMismatch {
            expected: instance.total_len(),
            got: solution.probs.len(),
        });
    }
    let gains = instance.gains().values();
    let losses = instance.eligible_losses();
    let original = instance.gains().original_index();
    let value = solution.opt_value;

    let mut c_star = vec![1.0; instance.total_len()];
    let mut upper_bound = f64::NEG_INFINITY;
    let mut mass = 0.0;
    let mut clamp_violation: f64 = 0.0;
    for (pos, &idx) in original.iter().enumerate() {
        let (g, l) = (gains[pos], losses[pos]);
        let c = if solution.probs[idx] > 0.0 {
            let raw = (value + l) / (g + l);
            let clamped = raw.clamp(0.0, 1.0);
            clamp_violation = clamp_violation.max((raw - clamped).abs());
            clamped
        } else {
            1.0
        };
        c_star[idx] = c;
        mass += c;
        upper_bound = upper_bound.max(c * (g + l) - l);
    }
    let budget = instance.n() as f64 - instance.m();
    Ok(DualCertificate {
        c_star,
        upper_bound,
        mass_residual: (mass - budget).abs(),
        gap: (upper_bound - value).abs(),
        clamp_violation,
    })
}

/// Checks `solution` against its own certificate.
///
/// `tol` is relative to `max(1, |opt_value|)`; the mass residual is judged
/// relative to `max(1, n - m)`.
pub fn verify(instance: &RobustInstance, solution: &SamplerSolution, tol: f64) -> Result<Verdict> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("tolerance {tol} must be positive")));
    }
    if solution.probs.len() != instance.total_len() {
        return Err(Error::DimensionMismatch {
            expected: instance.total_len(),
            got: solution.probs.len(),
        });
    }
    if let Err(Error::NotADistribution(why)) = check_distribution(&solution.probs) {
        return Ok(Verdict::Infeasible(Infeasibility::NotADistribution(why)));
    }
    let achieved = match game_value(instance, &solution.probs) {
        Ok(v) => v,
        Err(Error::NotADistribution(why)) => {
            return Ok(Verdict::Infeasible(Infeasibility::NotADistribution(why)))
        }
        Err(e) => return Err(e),
    };
    let cert = build_certificate(instance, solution)?;
    let scale = solution.opt_value.abs().max(1.0);
    if cert.clamp_violation > tol * scale {
        return Ok(Verdict::Infeasible(Infeasibility::MaskOutOfRange(
            cert.clamp_violation,
        )));
    }
    let budget = instance.n() as f64 - instance.m();
    if cert.mass_residual > tol * budget.max(1.0) {
        return Ok(Verdict::Infeasible(Infeasibility::MassMismatch(cert.mass_residual)));
    }
    let achieved_ok = (achieved - solution.opt_value).abs() <= tol * scale;
    if achieved_ok && cert.gap <= tol * scale {
        Ok(Verdict::Optimal)
    } else {
        Ok(Verdict::Suboptimal {
            achieved,
            upper_bound: cert.upper_bound,
            gap: cert.upper_bound - achieved,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_general, solve_relative, LossModel};

    #[test]
    fn relative_example_certificate() {
        let inst = RobustInstance::new(&[0.9, 0.6, 0.3], LossModel::Relative(0.5), 1.0).unwrap();
        let sol = solve_relative(&[0.9, 0.6, 0.3], 1.0, 0.5).unwrap();
        let cert = build_certificate(&inst, &sol).unwrap();
        // c_i = (N + 0.5 g_i) / (1.5 g_i) with N = 27/110.
        let n_val = 27.0 / 110.0;
        for (c, g) in cert.c_star.iter().zip([0.9, 0.6, 0.3]) {
            assert!((c - (n_val + 0.5 * g) / (1.5 * g)).abs() < 1e-12);
        }
        assert!((cert.c_star[0] - 0.515).abs() < 1e-3);
        assert!((cert.c_star[1] - 0.606).abs() < 1e-3);
        assert!((cert.c_star[2] - 0.879).abs() < 1e-3);
        assert!(cert.mass_residual < 1e-12);
        assert!((cert.upper_bound - sol.opt_value).abs() < 1e-12);
        assert_eq!(cert.clamp_violation, 0.0);
    }

    #[test]
    fn zero_budget_gives_all_correct_mask() {
        let inst = RobustInstance::new(&[0.9, 0.6, 0.3], LossModel::Relative(0.2), 0.0).unwrap();
        let sol = solve_general(&inst);
        let cert = build_certificate(&inst, &sol).unwrap();
        for c in &cert.c_star {
            assert!((c - 1.0).abs() < 1e-15);
        }
        assert!(cert.mass_residual < 1e-12);
    }

    #[test]
    fn symmetric_pair() {
        let inst = RobustInstance::new(&[1.0, 1.0], LossModel::Zero, 1.0).unwrap();
        let sol = solve_general(&inst);
        let cert = build_certificate(&inst, &sol).unwrap();
        assert_eq!(cert.c_star, vec![0.5, 0.5]);
        assert_eq!(cert.upper_bound, 0.5);
        assert_eq!(verify(&inst, &sol, 1e-9).unwrap(), Verdict::Optimal);
    }

    #[test]
    fn perturbed_solution_is_suboptimal() {
        let inst = RobustInstance::new(&[0.9, 0.6, 0.3], LossModel::Relative(0.5), 1.0).unwrap();
        let mut sol = solve_relative(&[0.9, 0.6, 0.3], 1.0, 0.5).unwrap();
        sol.probs[0] += 0.01;
        sol.probs[1] -= 0.01;
        let achieved = game_value(&inst, &sol.probs).unwrap();
        match verify(&inst, &sol, 1e-9).unwrap() {
            Verdict::Suboptimal { achieved: a, gap, .. } => {
                assert_eq!(a, achieved);
                assert!(gap > 0.0);
                assert!(a < sol.opt_value);
            }
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn unnormalized_solution_is_infeasible() {
        let inst = RobustInstance::new(&[0.9, 0.6, 0.3], LossModel::Relative(0.5), 1.0).unwrap();
        let mut sol = solve_relative(&[0.9, 0.6, 0.3], 1.0, 0.5).unwrap();
        sol.probs[2] += 0.1;
        assert!(matches!(
            verify(&inst, &sol, 1e-9).unwrap(),
            Verdict::Infeasible(Infeasibility::NotADistribution(_))
        ));
    }

    #[test]
    fn wrong_claimed_value_is_caught() {
        let inst = RobustInstance::new(&[0.9, 0.6, 0.3], LossModel::Zero, 1.0).unwrap();
        let mut sol = solve_general(&inst);
        sol.opt_value *= 1.01;
        assert!(!verify(&inst, &sol, 1e-9).unwrap().is_optimal());
    }

    #[test]
    fn rejects_bad_tolerance_and_dimensions() {
        let inst = RobustInstance::new(&[0.9, 0.6], LossModel::Zero, 1.0).unwrap();
        let sol = solve_general(&inst);
        assert!(verify(&inst, &sol, 0.0).is_err());
        let other = RobustInstance::new(&[0.9, 0.6, 0.1], LossModel::Zero, 1.0).unwrap();
        assert!(matches!(
            build_certificate(&other, &sol),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
