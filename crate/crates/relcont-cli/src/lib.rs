//! Scenario files, check suites and reports behind the `relcont` binary.
//!
//! A scenario describes a chart, grids, metric, fields and a constitutive
//! model; commands run named check suites on it, with refinement studies for
//! the discretized identities, and report one JSON line per check.

pub mod build;
pub mod run;
pub mod scenario;
pub mod suites;

pub use build::{Compiled, InputError, Problem};
pub use run::{run, Command, Options, Record, Report, RunError, Status};
pub use scenario::{Scenario, ScenarioError};
pub use suites::{Kind, SemSelect};
