use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rad::commands::{self, LossChoice, Outcome, RoundingMode};
use rad::{CliError, DEFAULT_SEED};
use rad_core::estimation::BoundMode;
use rad_core::sampling::PlanMode;

// The solver allocates several n-sized buffers per call; glibc hands large
// ones out as fresh mappings, so every solve pays page faults on them.
#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Parser)]
#[command(name = "rad", version, about = "Robust soft-label sampling under teacher mistakes")]
struct Cli {
    /// Seed for every random choice (default 20240917).
    #[arg(long, global = true, env = "RAD_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(multiple = false)]
struct LossArgs {
    /// Relative loss weight (default 1 - m/n).
    #[arg(long)]
    w: Option<f64>,
    /// Per-point losses, same format and order as the gains.
    #[arg(long)]
    loss_file: Option<PathBuf>,
    /// No loss for mislabeled picks.
    #[arg(long)]
    zero_loss: bool,
}

impl LossArgs {
    fn choice(&self) -> LossChoice {
        match (self.w, &self.loss_file, self.zero_loss) {
            (Some(w), _, _) => LossChoice::Relative(w),
            (_, Some(path), _) => LossChoice::File(path.clone()),
            (_, _, true) => LossChoice::Zero,
            _ => LossChoice::DefaultRelative,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PlanArg {
    PaperCap,
    WaterFill,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    PlugIn,
    Conservative,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal sampling distribution for a gains file.
    Solve {
        #[arg(long)]
        gains: PathBuf,
        /// Number of points the teacher mislabels.
        #[arg(long)]
        m: f64,
        #[command(flatten)]
        loss: LossArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Check optimality with the dual certificate and optionally a grid search.
    Certify {
        #[arg(long)]
        gains: PathBuf,
        #[arg(long)]
        m: f64,
        #[command(flatten)]
        loss: LossArgs,
        /// Distribution to certify instead of the solver's.
        #[arg(long)]
        probs: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Compare against exhaustive grid search (at most 4 points).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Draw a batch of point ids from a probability file.
    Sample {
        #[arg(long)]
        probs: PathBuf,
        #[arg(long)]
        b: usize,
        #[arg(long, value_enum, default_value = "depround")]
        mode: RoundingMode,
        #[arg(long, value_enum, default_value = "paper-cap")]
        plan: PlanArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Estimate the teacher's mistakes on a pool from validation pairs.
    EstimateM {
        /// CSV with header `predicted,true`.
        #[arg(long)]
        validation: PathBuf,
        #[arg(long)]
        pool_size: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, value_enum, default_value = "plug-in")]
        bound: BoundArg,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Realized-gain game between strategies and a mislabeling world.
    SimulateGame {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Active distillation on synthetic data.
    SimulateDistill {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Time the solver at several sizes.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "131072,262144,524288,1048576,2097152")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.command {
        Command::Solve { gains, m, loss, out, record } => commands::cmd_solve(&commands::SolveArgs {
            gains,
            m,
            loss: loss.choice(),
            out,
            record,
        }),
        Command::Certify {
            gains,
            m,
            loss,
            probs,
            tol,
            oracle,
            step,
            out,
            record,
        } => commands::cmd_certify(&commands::CertifyArgs {
            gains,
            m,
            loss: loss.choice(),
            probs,
            tol,
            oracle,
            step,
            out,
            record,
        }),
        Command::Sample {
            probs,
            b,
            mode,
            plan,
            out,
            record,
        } => commands::cmd_sample(&commands::SampleArgs {
            probs,
            b,
            mode,
            plan: match plan {
                PlanArg::PaperCap => PlanMode::PaperCap,
                PlanArg::WaterFill => PlanMode::WaterFill,
            },
            seed,
            out,
            record,
        }),
        Command::EstimateM {
            validation,
            pool_size,
            delta,
            bound,
            epsilon,
            out,
            record,
        } => commands::cmd_estimate_m(&commands::EstimateArgs {
            validation,
            pool_size,
            delta,
            bound: match bound {
                BoundArg::PlugIn => BoundMode::PlugIn,
                BoundArg::Conservative => BoundMode::Conservative,
            },
            epsilon,
            out,
            record,
        }),
        Command::SimulateGame { config, out_dir } => commands::cmd_simulate_game(&commands::SimulateArgs {
            config,
            out_dir,
            seed: cli.seed,
        }),
        Command::SimulateDistill { config, out_dir } => {
            commands::cmd_simulate_distill(&commands::SimulateArgs {
                config,
                out_dir,
                seed: cli.seed,
            })
        }
        Command::Bench { n, repeats, out, record } => commands::cmd_bench(&commands::BenchArgs {
            ns: n,
            repeats,
            seed,
            out,
            record,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            let written = match &outcome.record_path {
                Some(path) => outcome.record.write(path),
                None => {
                    eprintln!("{}", serde_json::to_string(&outcome.record).expect("record serializes"));
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
