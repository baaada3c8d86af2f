//! Seeded multi-trial experiments and their on-disk artifacts.
//!
//! Trial `k` of an experiment is seeded with `base_seed + k`, so trials can
//! run in any order, or concurrently, and still produce the same files.

mod artifacts;
mod config;
mod experiment;

pub use artifacts::{
    emit_policy_chart, format_summary, summarize, write_oracle_table, write_returns, write_summary,
    SUMMARY_FILE,
};
pub use config::{AgentKind, ExperimentConfig, ScheduleSpec};
pub use experiment::{
    make_agent, run_experiment, run_trial, run_trials, train_agent, ExperimentSummary,
    OracleOptimum, PolicyCount, TrainingLog, TrialRecord,
};
