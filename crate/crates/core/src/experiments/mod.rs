//! Configuration, orchestration, persistence and reporting.

mod commands;
mod config;
mod output;
mod suite;

pub use commands::{
    free_control, judge_sweep, probe, report, simulate, summary_text, sweep, sweep_preset, sweep_spec, verify,
    with_jobs, Command, Outcome, SweepOutcome, PROBE_DOUBLING_TOLERANCE, SWEEP_PHASE_STEP,
};
pub use config::{apply_override, ExperimentConfig, ProbeSection, SweepSection, DEFAULT_CONFIG};
pub use output::{
    aligned_table, bound_reports_text, scaling_csv, scaling_gnuplot, scaling_text, write_manifest, ArtifactDir,
    FAILED_MARKER,
};
pub use suite::{run_suite, Check, VerifySummary};
