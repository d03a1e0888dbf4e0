//! Experiment harness for `zopt-core`: plan files, parallel benchmark runs, CSV traces
//! and summaries, SVG figures and the `zopt` command line.

pub mod cli;
pub mod error;
pub mod output;
pub mod plan;
pub mod runner;
pub mod summary;
pub mod svg;

pub use cli::{bench, cli_main, BenchOutput};
pub use error::{HarnessError, Result};
pub use output::{read_trace_csv, write_summary_csv, write_trace_csv};
pub use plan::{parse_plan, Algorithm, ExperimentPlan, ParsedPlan};
pub use runner::{run_plan, trial_stream, RunRecord, RunSettings};
pub use summary::{summarize, SummaryRow};
pub use svg::{comparison_svg, convergence_svg};
