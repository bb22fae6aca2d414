use std::path::PathBuf;
use std::time::Instant;

use rad_core::solver::{solve_general, LossModel};
use serde::{Deserialize, Serialize};

use super::{emit_json, load_instance, ok_or_abstain, single_file_record_path, LossChoice, Outcome};
use crate::error::Result;
use crate::record::RunRecord;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Serialize)]
pub struct SolveArgs {
    pub gains: PathBuf,
    pub m: f64,
    pub loss: LossChoice,
    pub out: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

/// Solution file written by `rad solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema_version: u32,
    /// Point ids in input order.
    pub ids: Vec<u64>,
    /// Sampling probabilities in input order.
    pub probs: Vec<f64>,
    pub k_star: usize,
    pub opt_value: f64,
    pub should_abstain: bool,
    /// Ids of the support, highest gain first.
    pub support: Vec<u64>,
    pub m: f64,
    pub loss: LossModel,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Outcome> {
    let mut record = RunRecord::new("solve", args, Vec::new())?;
    let (gains, instance) = load_instance(&args.gains, args.m, &args.loss)?;
    let start = Instant::now();
    let sol = solve_general(&instance);
    record.time("solve", start.elapsed().as_secs_f64());

    let ids = gains.ids();
    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        support: sol.support().iter().map(|&i| ids[i]).collect(),
        ids,
        probs: sol.probs,
        k_star: sol.k_star,
        opt_value: sol.opt_value,
        should_abstain: sol.should_abstain,
        m: args.m,
        loss: instance.loss_model().clone(),
    };
    let stdout = emit_json(&report, args.out.as_deref(), &mut record)?;
    Ok(Outcome {
        exit_code: ok_or_abstain(report.should_abstain),
        stdout,
        record,
        record_path: single_file_record_path(args.record.as_deref(), args.out.as_deref()),
    })
}
