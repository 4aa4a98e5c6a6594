//! Configuration-driven driver for the sigma-core laboratory: seeds, flows,
//! audit batteries and refinement studies, with CSV/JSON outputs and a
//! manifest per run.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{cmd_audit, cmd_convergence, cmd_feasibility_scan, cmd_simulate, RunManifest};
pub use config::{resolve_out_dir, AuditKind, Family, Overrides, RunConfig};
pub use error::{CliError, ConfigError};
