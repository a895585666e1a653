//! Scenario runner for `cvqkd-core`: JSON scenarios in, deterministic CSV out.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod csvio;
pub mod error;
pub mod format;
pub mod scenario;

pub use error::{exit, CliError, Result};
