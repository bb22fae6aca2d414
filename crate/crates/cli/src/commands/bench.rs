use std::path::PathBuf;
use std::time::Instant;

use rad_core::solver::{default_w, solve_relative};
use rad_core::verification::{random_instance, LossPolicy, MPolicy};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::error::{exit, CliError, Result};
use crate::formats;
use crate::record::{record_path_for, RunRecord};

#[derive(Debug, Clone, Serialize)]
pub struct BenchArgs {
    pub ns: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

/// Timing of the relative-loss solver at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub repeats: usize,
    pub median_seconds: f64,
    pub min_seconds: f64,
    pub max_seconds: f64,
}

/// Times `solve_relative` on random gains with `m = n / 10` and the default
/// weight, `repeats` times per size. Instance generation is not timed.
///
/// Sizes are interleaved within each repeat so that a slow stretch on a
/// shared machine lands on every size rather than skewing one of them.
pub fn bench_solver(ns: &[usize], repeats: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if repeats == 0 || ns.is_empty() {
        return Err(CliError::Config("need at least one size and one repeat".into()));
    }
    let mut cases = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(CliError::Config("sizes must be positive".into()));
        }
        let instance = random_instance(seed ^ n as u64, n..=n, MPolicy::Fraction(0.1), LossPolicy::Zero)?;
        let m = instance.m();
        cases.push((instance.gains().values().to_vec(), m, default_w(m, n)?));
    }
    // One untimed solve per size so page faults on first touch are not measured.
    for (gains, m, w) in &cases {
        std::hint::black_box(solve_relative(gains, *m, *w)?);
    }
    let mut times = vec![Vec::with_capacity(repeats); cases.len()];
    for _ in 0..repeats {
        for ((gains, m, w), t) in cases.iter().zip(&mut times) {
            let start = Instant::now();
            let sol = solve_relative(gains, *m, *w)?;
            t.push(start.elapsed().as_secs_f64());
            std::hint::black_box(sol);
        }
    }
    Ok(ns
        .iter()
        .zip(times)
        .map(|(&n, mut t)| {
            t.sort_by(f64::total_cmp);
            let mid = t.len() / 2;
            let median = if t.len() % 2 == 1 { t[mid] } else { 0.5 * (t[mid - 1] + t[mid]) };
            BenchRow {
                n,
                repeats,
                median_seconds: median,
                min_seconds: t[0],
                max_seconds: t[t.len() - 1],
            }
        })
        .collect())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<Outcome> {
    let mut record = RunRecord::new("bench", args, vec![args.seed])?;
    let start = Instant::now();
    let rows = bench_solver(&args.ns, args.repeats, args.seed)?;
    record.time("bench", start.elapsed().as_secs_f64());
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        writer.serialize(row)?;
    }
    let text = String::from_utf8(writer.into_inner().map_err(|e| CliError::Config(e.to_string()))?)
        .expect("csv output is utf-8");
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
        record_path: args.record.clone().or_else(|| args.out.as_deref().map(record_path_for)),
    })
}
