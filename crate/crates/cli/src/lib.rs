//! Configuration loading, command dispatch and deterministic output for the
//! `polariton-engine` binary.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;
pub mod units;

pub use config::{emit_config, load_config, load_config_str, Command, ConfigError, RunConfig};
pub use run::{execute, run, RunError, RunManifest, Status};
