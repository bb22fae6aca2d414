use std::fmt::Write as _;
use std::path::PathBuf;

use rad_core::certificate::{build_certificate, verify, DualCertificate, Verdict};
use rad_core::solver::{game_value, solve_general, SamplerSolution};
use rad_core::verification::grid_oracle;
use serde::{Deserialize, Serialize};

use super::{emit_json, load_instance, single_file_record_path, LossChoice, Outcome};
use crate::error::{exit, CliError, Result};
use crate::formats;
use crate::SCHEMA_VERSION;
use crate::record::RunRecord;

#[derive(Debug, Clone, Serialize)]
pub struct CertifyArgs {
    pub gains: PathBuf,
    pub m: f64,
    pub loss: LossChoice,
    /// Certify this distribution instead of the solver's.
    pub probs: Option<PathBuf>,
    pub tol: f64,
    pub oracle: bool,
    pub step: f64,
    pub out: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

/// Grid search versus the certified value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub best_value: f64,
    pub best_p: Vec<f64>,
    pub step: f64,
    pub evaluations: usize,
    /// `|opt_value - best_value|`.
    pub difference: f64,
    /// `max(g + l) * step * sqrt(n)`.
    pub allowed: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub schema_version: u32,
    pub verdict: Verdict,
    pub opt_value: f64,
    pub certificate: DualCertificate,
    pub oracle: Option<OracleComparison>,
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<Outcome> {
    let mut record = RunRecord::new("certify", args, Vec::new())?;
    let (_, instance) = load_instance(&args.gains, args.m, &args.loss)?;
    let solution = match &args.probs {
        None => solve_general(&instance),
        Some(path) => {
            let probs = formats::read_values(path, "prob")?.values;
            let opt_value = game_value(&instance, &probs)?;
            let original = instance.gains().original_index();
            let mut sort_perm: Vec<usize> = instance.descending_order().iter().map(|&p| original[p]).collect();
            // Support first so that `support()` lists the positive entries.
            sort_perm.sort_by_key(|&i| probs[i] <= 0.0);
            SamplerSolution {
                k_star: probs.iter().filter(|&&p| p > 0.0).count(),
                should_abstain: opt_value < 0.0,
                probs,
                opt_value,
                sort_perm,
            }
        }
    };
    let verdict = verify(&instance, &solution, args.tol)?;
    let certificate = build_certificate(&instance, &solution)?;

    let oracle = if args.oracle {
        if instance.n() > 4 {
            return Err(CliError::Config(format!(
                "--oracle needs at most 4 eligible points, got {}",
                instance.n()
            )));
        }
        let res = grid_oracle(&instance, args.step)?;
        let lipschitz = instance
            .gains()
            .values()
            .iter()
            .zip(instance.eligible_losses())
            .map(|(g, l)| g + l)
            .fold(0.0, f64::max);
        let allowed = lipschitz * res.grid_step * (instance.n() as f64).sqrt();
        let difference = (solution.opt_value - res.best_value).abs();
        Some(OracleComparison {
            agrees: difference <= allowed,
            best_value: res.best_value,
            best_p: res.best_p,
            step: res.grid_step,
            evaluations: res.evaluations,
            difference,
            allowed,
        })
    } else {
        None
    };

    let passed = verdict.is_optimal() && oracle.as_ref().is_none_or(|o| o.agrees);
    let mut stdout = String::new();
    let label = match &verdict {
        Verdict::Optimal => "optimal",
        Verdict::Suboptimal { .. } => "suboptimal",
        Verdict::Infeasible(_) => "infeasible",
    };
    writeln!(stdout, "verdict: {label}").unwrap();
    writeln!(stdout, "opt_value: {}", solution.opt_value).unwrap();
    writeln!(stdout, "gap: {:e}", certificate.gap).unwrap();
    writeln!(stdout, "mass_residual: {:e}", certificate.mass_residual).unwrap();
    if let Some(o) = &oracle {
        writeln!(
            stdout,
            "oracle: best {} at step {} ({} points), difference {:e} <= {:e}: {}",
            o.best_value, o.step, o.evaluations, o.difference, o.allowed, o.agrees
        )
        .unwrap();
    }
    let report = CertifyReport {
        schema_version: SCHEMA_VERSION,
        verdict,
        opt_value: solution.opt_value,
        certificate,
        oracle,
    };
    if let Some(path) = &args.out {
        emit_json(&report, Some(path), &mut record)?;
    }
    Ok(Outcome {
        exit_code: if passed { exit::OK } else { exit::VERIFICATION },
        stdout,
        record,
        record_path: single_file_record_path(args.record.as_deref(), args.out.as_deref()),
    })
}
