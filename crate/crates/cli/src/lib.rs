//! File formats, run records and subcommands for the `rad` binary.
//!
//! The numerics live in `rad-core`; this crate reads inputs, writes
//! canonical JSON and CSV, and records every invocation.

pub mod canonical;
pub mod commands;
pub mod error;
pub mod formats;
pub mod record;

pub use error::{exit, CliError, Result};

/// Version tag of every JSON file this crate reads or writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when neither `--seed` nor `RAD_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_917;
