use std::path::{Path, PathBuf};
use std::time::Instant;

use rad_core::sim::distill::{run_experiment, DistillConfig};
use rad_core::sim::game::{run_game, GameConfig};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::error::{exit, CliError, Result};
use crate::record::RunRecord;
use crate::{canonical, formats, DEFAULT_SEED, SCHEMA_VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct SimulateArgs {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    /// Replaces the configured seeds with `seed, seed + 1, ...` (same count).
    pub seed: Option<u64>,
}

/// `simulate-game` configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub config: GameConfig,
}

/// `simulate-distill` configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistillFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub config: DistillConfig,
}

fn check_schema(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "schema_version {found} is not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

fn resolve_seeds(configured: &[u64], overridden: Option<u64>) -> Vec<u64> {
    match overridden {
        Some(base) => (0..configured.len().max(1) as u64).map(|k| base + k).collect(),
        None if configured.is_empty() => vec![DEFAULT_SEED],
        None => configured.to_vec(),
    }
}

fn csv_text<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_output(dir: &Path, name: &str, text: &str, record: &mut RunRecord) -> Result<()> {
    let path = dir.join(name);
    formats::write_string(&path, text)?;
    record.output(&path);
    Ok(())
}

#[derive(Serialize)]
struct GameRoundRow<'a> {
    seed: u64,
    strategy: &'a str,
    round: usize,
    selected: usize,
    mislabeled: usize,
    realized_gain: f64,
    cumulative_gain: f64,
    opt_value: Option<f64>,
}

#[derive(Serialize)]
struct GameSummaryRow<'a> {
    strategy: &'a str,
    mean_cumulative_gain: f64,
    std_error: f64,
    mean_first_round_gain: f64,
}

pub fn cmd_simulate_game(args: &SimulateArgs) -> Result<Outcome> {
    let file: GameFile = formats::read_json(&args.config)?;
    check_schema(file.schema_version)?;
    let mut config = file.config;
    config.seeds = resolve_seeds(&config.seeds, args.seed);
    let resolved = GameFile {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
    };
    let mut record = RunRecord::new("simulate-game", &resolved, config.seeds.clone())?;

    let start = Instant::now();
    let trace = run_game(&config)?;
    record.time("simulate", start.elapsed().as_secs_f64());

    write_output(&args.out_dir, "trace.json", &canonical::to_string(&trace)?, &mut record)?;
    let rows = trace.rounds.iter().map(|r| GameRoundRow {
        seed: r.seed,
        strategy: &r.strategy,
        round: r.round,
        selected: r.selected.len(),
        mislabeled: r.mislabeled,
        realized_gain: r.realized_gain,
        cumulative_gain: r.cumulative_gain,
        opt_value: r.opt_value,
    });
    write_output(&args.out_dir, "rounds.csv", &csv_text(rows)?, &mut record)?;
    let summary = trace.summaries.iter().map(|s| GameSummaryRow {
        strategy: &s.strategy,
        mean_cumulative_gain: s.mean_cumulative_gain,
        std_error: s.std_error,
        mean_first_round_gain: s.mean_first_round_gain,
    });
    let summary_text = csv_text(summary)?;
    write_output(&args.out_dir, "summary.csv", &summary_text, &mut record)?;

    Ok(Outcome {
        exit_code: exit::OK,
        stdout: summary_text,
        record,
        record_path: Some(args.out_dir.join("run_record.json")),
    })
}

#[derive(Serialize)]
struct IterationRow<'a> {
    seed: u64,
    strategy: &'a str,
    iteration: usize,
    queried: usize,
    cumulative_queried: usize,
    m_hat: f64,
    test_accuracy: f64,
    realized_gain: f64,
    mislabeled: usize,
    opt_value: Option<f64>,
    expected_gain: Option<f64>,
}

#[derive(Serialize)]
struct DistillSummaryRow<'a> {
    strategy: &'a str,
    mean_final_accuracy: f64,
    std_error: f64,
}

pub fn cmd_simulate_distill(args: &SimulateArgs) -> Result<Outcome> {
    let file: DistillFile = formats::read_json(&args.config)?;
    check_schema(file.schema_version)?;
    let mut config = file.config;
    config.seeds = resolve_seeds(&config.seeds, args.seed);
    let resolved = DistillFile {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
    };
    let mut record = RunRecord::new("simulate-distill", &resolved, config.seeds.clone())?;

    let start = Instant::now();
    let report = run_experiment(&config)?;
    record.time("simulate", start.elapsed().as_secs_f64());

    write_output(&args.out_dir, "trace.json", &canonical::to_string(&report)?, &mut record)?;
    let rows = report.traces.iter().flat_map(|t| {
        t.iterations.iter().map(move |r| IterationRow {
            seed: t.seed,
            strategy: &t.strategy,
            iteration: r.iteration,
            queried: r.queried,
            cumulative_queried: r.cumulative_queried,
            m_hat: r.m_hat,
            test_accuracy: r.test_accuracy,
            realized_gain: r.realized_gain,
            mislabeled: r.mislabeled,
            opt_value: r.opt_value,
            expected_gain: r.expected_gain,
        })
    });
    write_output(&args.out_dir, "iterations.csv", &csv_text(rows)?, &mut record)?;
    let summary = report.summaries.iter().map(|s| DistillSummaryRow {
        strategy: &s.strategy,
        mean_final_accuracy: s.mean_final_accuracy,
        std_error: s.std_error,
    });
    let summary_text = csv_text(summary)?;
    write_output(&args.out_dir, "summary.csv", &summary_text, &mut record)?;

    Ok(Outcome {
        exit_code: exit::OK,
        stdout: summary_text,
        record,
        record_path: Some(args.out_dir.join("run_record.json")),
    })
}
