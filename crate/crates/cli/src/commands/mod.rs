//! One function per subcommand. Each returns an [`Outcome`]; the binary
//! only prints and exits.

mod bench;
mod certify;
mod estimate;
mod sample;
mod simulate;
mod solve;

use std::path::{Path, PathBuf};

use rad_core::solver::{default_w, LossModel, RobustInstance};
use serde::Serialize;

pub use bench::{bench_solver, cmd_bench, BenchArgs, BenchRow};
pub use certify::{cmd_certify, CertifyArgs, CertifyReport, OracleComparison};
pub use estimate::{cmd_estimate_m, EstimateArgs};
pub use sample::{cmd_sample, RoundingMode, SampleArgs};
pub use simulate::{cmd_simulate_distill, cmd_simulate_game, DistillFile, GameFile, SimulateArgs};
pub use solve::{cmd_solve, SolveArgs, SolveReport};

use crate::error::{exit, CliError, Result};
use crate::formats::{self, ValueFile};
use crate::record::{record_path_for, RunRecord};
use crate::canonical;

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    /// Text for standard output.
    pub stdout: String,
    pub record: RunRecord,
    /// Where the record should go; `None` prints it to standard error.
    pub record_path: Option<PathBuf>,
}

/// How losses are specified on the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossChoice {
    /// Relative losses with `w = 1 - m/n`.
    DefaultRelative,
    Relative(f64),
    Zero,
    File(PathBuf),
}

pub(crate) fn resolve_losses(choice: &LossChoice, gains: &ValueFile, m: f64) -> Result<LossModel> {
    Ok(match choice {
        LossChoice::DefaultRelative => LossModel::Relative(default_w(m, gains.values.len())?),
        LossChoice::Relative(w) => LossModel::Relative(*w),
        LossChoice::Zero => LossModel::Zero,
        LossChoice::File(path) => {
            let losses = formats::read_values(path, "loss")?;
            if losses.values.len() != gains.values.len() {
                return Err(CliError::Config(format!(
                    "{} losses for {} gains",
                    losses.values.len(),
                    gains.values.len()
                )));
            }
            if losses.indices.is_some() && losses.ids() != gains.ids() {
                return Err(CliError::Config("loss file indices do not match the gains file".into()));
            }
            LossModel::Explicit(losses.values)
        }
    })
}

pub(crate) fn load_instance(gains_path: &Path, m: f64, loss: &LossChoice) -> Result<(ValueFile, RobustInstance)> {
    let gains = formats::read_values(gains_path, "gain")?;
    let model = resolve_losses(loss, &gains, m)?;
    let instance = RobustInstance::new(&gains.values, model, m)?;
    Ok((gains, instance))
}

/// Writes `value` canonically to `out`, or returns it for standard output.
pub(crate) fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, record: &mut RunRecord) -> Result<String> {
    let text = canonical::to_string(value)?;
    match out {
        Some(path) => {
            formats::write_string(path, &text)?;
            record.output(path);
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub(crate) fn single_file_record_path(record: Option<&Path>, out: Option<&Path>) -> Option<PathBuf> {
    record
        .map(Path::to_path_buf)
        .or_else(|| out.map(record_path_for))
}

pub(crate) fn ok_or_abstain(abstain: bool) -> i32 {
    if abstain {
        exit::ABSTAIN
    } else {
        exit::OK
    }
}
