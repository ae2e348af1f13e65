//! Command-line surface for the `squintless` solver: configuration, result
//! export and the subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod export;
pub mod validate;

pub use commands::run;
pub use config::{parse_config, Command, ConfigError, RunConfig};
pub use export::{export_heatmap_csv, export_report_json, ReportDocument};
