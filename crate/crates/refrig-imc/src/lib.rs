//! File formats, CSV/SVG output, the parallel sweep driver and the
//! subcommands behind the `refrig-imc` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod csvio;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod project;
pub mod svg;

pub use error::{CliError, CliResult};
pub use project::{Overrides, Project};
