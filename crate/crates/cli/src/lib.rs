//! Library side of the `vlcsim` command: config handling, experiment runs and
//! the validation suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;
pub mod validate;

pub use config::{Config, ConfigError};
pub use run::{run, Experiment, RunOutput};
