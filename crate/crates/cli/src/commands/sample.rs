use std::fmt::Write as _;
use std::path::PathBuf;

use rad_core::sampling::{bernoulli_round, dep_round, plan_batch, PlanMode};
use serde::Serialize;

use super::{single_file_record_path, Outcome};
use crate::error::{exit, Result};
use crate::formats;
use crate::record::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RoundingMode {
    /// Exactly `b` points with the planned marginals.
    Depround,
    /// Independent coin flips with the planned marginals.
    Bernoulli,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleArgs {
    pub probs: PathBuf,
    pub b: usize,
    pub mode: RoundingMode,
    pub plan: PlanMode,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

pub fn cmd_sample(args: &SampleArgs) -> Result<Outcome> {
    let mut record = RunRecord::new("sample", args, vec![args.seed])?;
    let probs = formats::read_values(&args.probs, "prob")?;
    let plan = plan_batch(&probs.values, args.b, args.plan)?;
    let sample = match args.mode {
        RoundingMode::Depround => dep_round(&plan.q, args.seed)?,
        RoundingMode::Bernoulli => bernoulli_round(&plan.q, args.seed)?,
    };
    let ids = probs.ids();
    let mut text = String::new();
    for &i in &sample.indices {
        writeln!(text, "{}", ids[i]).unwrap();
    }
    let stdout = match &args.out {
        Some(path) => {
            formats::write_string(path, &text)?;
            record.output(path);
            String::new()
        }
        None => text,
    };
    Ok(Outcome {
        exit_code: exit::OK,
        stdout,
        record,
        record_path: single_file_record_path(args.record.as_deref(), args.out.as_deref()),
    })
}
