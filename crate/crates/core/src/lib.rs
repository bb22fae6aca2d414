//! Minimax-optimal soft-label sampling for robust active distillation.
//!
//! A student model scores unlabeled points by how informative they are (the
//! *gain*); a teacher supplies soft labels but gets some unknown subset of
//! `m` points wrong. This crate computes the sampling distribution that
//! maximizes the worst-case expected gain over every way of placing those
//! `m` mistakes, proves optimality with an explicit dual certificate, and
//! turns the distribution into exact-size batches.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command line live in the companion `rad` crate.
//!
//! ```
//! use rad_core::solver::solve_relative;
//!
//! let sol = solve_relative(&[0.9, 0.6, 0.3], 1.0, 0.5).unwrap();
//! assert_eq!(sol.k_star, 3);
//! assert!((sol.opt_value - 0.245_454_545_454_545_4).abs() < 1e-12);
//! ```
#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod certificate;
pub mod error;
pub mod estimation;
pub mod gains;
mod math;
pub mod rng;
pub mod sampling;
pub mod sim;
pub mod solver;
pub mod verification;

pub use error::{Error, Result};
