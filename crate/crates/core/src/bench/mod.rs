//! Metrics, experiment configuration and the experiment suites driven by
//! the command-line tool.

pub mod config;
pub mod experiments;
pub mod metrics;

pub use config::{DepthProfile, ExperimentConfig, HamiltonianFamily, Method, TaskKind};
pub use experiments::{run, write_outputs, Outputs, Report, Results};
pub use metrics::{qpu_reduction, relative_error, success_rate, MetricReport, TrialOutcome, SUCCESS_THRESHOLD};
