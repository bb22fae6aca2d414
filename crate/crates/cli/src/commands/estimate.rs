use std::path::PathBuf;

use rad_core::estimation::{estimate_m_with, shrink_m, BoundMode, MislabelEstimate};
use serde::{Deserialize, Serialize};

use super::{emit_json, single_file_record_path, Outcome};
use crate::error::{exit, Result};
use crate::formats;
use crate::record::RunRecord;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Serialize)]
pub struct EstimateArgs {
    pub validation: PathBuf,
    pub pool_size: usize,
    pub delta: f64,
    pub bound: BoundMode,
    /// Also report `m_hat / (1 + epsilon)`.
    pub epsilon: Option<f64>,
    pub out: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    #[serde(flatten)]
    pub estimate: MislabelEstimate,
    pub bound_mode: BoundMode,
    pub epsilon: Option<f64>,
    pub m_shrunk: Option<f64>,
}

pub fn cmd_estimate_m(args: &EstimateArgs) -> Result<Outcome> {
    let mut record = RunRecord::new("estimate-m", args, Vec::new())?;
    let pairs = formats::read_validation(&args.validation)?;
    let estimate = estimate_m_with(&pairs, args.pool_size, args.delta, args.bound)?;
    let report = EstimateReport {
        schema_version: SCHEMA_VERSION,
        m_shrunk: args.epsilon.map(|e| shrink_m(estimate.m_hat, e)),
        estimate,
        bound_mode: args.bound,
        epsilon: args.epsilon,
    };
    let stdout = emit_json(&report, args.out.as_deref(), &mut record)?;
    Ok(Outcome {
        exit_code: exit::OK,
        stdout,
        record,
        record_path: single_file_record_path(args.record.as_deref(), args.out.as_deref()),
    })
}
