#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use config::{Preset, RunConfig};
pub use error::CliError;
pub use table::{Format, Table};
