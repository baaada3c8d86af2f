use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use csv::{Terminator, WriterBuilder};

use crate::error::{Error, Result};
use crate::harness::experiment::{ExperimentSummary, TrialRecord};
use crate::momdp::EnvironmentSpec;
use crate::oracle::evaluate_all;
use crate::utility::UtilityOrdering;

pub const SUMMARY_FILE: &str = "summary.json";

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Writes the per-episode policy chart of one trial.
///
/// `meets_threshold` comes from the oracle mean of each policy, not from the
/// agent's own estimates.
pub fn emit_policy_chart(
    record: &TrialRecord,
    env: &EnvironmentSpec,
    ordering: &UtilityOrdering,
    path: impl AsRef<Path>,
) -> Result<()> {
    let meets: HashMap<String, bool> = evaluate_all(env)
        .into_iter()
        .map(|e| {
            (
                e.policy.identifier,
                ordering.meets_thresholds(&e.mean_return),
            )
        })
        .collect();
    let mut w = csv_writer(File::create(path)?);
    w.write_record(["episode", "policy", "meets_threshold"])?;
    for (episode, policy) in record.greedy.iter().enumerate() {
        let m = meets.get(policy).copied().unwrap_or(false);
        w.write_record([episode.to_string(), policy.clone(), m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `episode,obj1,obj2,...` with one row per training episode.
pub fn write_returns(record: &TrialRecord, path: impl AsRef<Path>) -> Result<()> {
    let objectives = record.returns.first().map_or(2, |r| r.len());
    let mut w = csv_writer(File::create(path)?);
    let mut header = vec!["episode".to_string()];
    header.extend((1..=objectives).map(|i| format!("obj{i}")));
    w.write_record(&header)?;
    for (episode, ret) in record.returns.iter().enumerate() {
        let mut row = vec![episode.to_string()];
        row.extend(ret.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Oracle table: every policy's exact mean return, whether it meets the
/// thresholds and whether it is SER-optimal.
pub fn write_oracle_table<W: Write>(
    env: &EnvironmentSpec,
    ordering: &UtilityOrdering,
    out: W,
) -> Result<()> {
    let evaluations = evaluate_all(env);
    let means: Vec<_> = evaluations.iter().map(|e| e.mean_return.clone()).collect();
    let best = ordering.tlo_argbest(&means)?;
    let mut w = csv_writer(out);
    let mut header = vec!["policy".to_string()];
    header.extend((1..=env.objective_count()).map(|i| format!("mean_obj{i}")));
    header.extend(["meets_threshold".to_string(), "is_ser_optimal".to_string()]);
    w.write_record(&header)?;
    for (i, e) in evaluations.iter().enumerate() {
        let mut row = vec![e.policy.identifier.clone()];
        row.extend(e.mean_return.iter().map(|v| v.to_string()));
        row.push(ordering.meets_thresholds(&e.mean_return).to_string());
        row.push((i == best).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(summary: &ExperimentSummary, dir: &Path) -> Result<()> {
    let mut json = serde_json::to_string_pretty(summary).expect("summary serializes");
    json.push('\n');
    fs::write(dir.join(SUMMARY_FILE), json)?;
    Ok(())
}

/// Reads back the summary of an experiment directory and checks that every
/// trial's CSVs are present.
pub fn summarize(dir: impl AsRef<Path>) -> Result<ExperimentSummary> {
    let dir = dir.as_ref();
    let path = dir.join(SUMMARY_FILE);
    if !path.is_file() {
        return Err(Error::MissingArtifacts(format!(
            "{} not found",
            path.display()
        )));
    }
    let text = fs::read_to_string(&path)?;
    let summary: ExperimentSummary = serde_json::from_str(&text).map_err(|e| Error::parse(&e))?;
    let missing: Vec<String> = (0..summary.trials())
        .flat_map(|k| {
            [
                format!("trial_{k}_chart.csv"),
                format!("trial_{k}_returns.csv"),
            ]
        })
        .filter(|f| !dir.join(f).is_file())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingArtifacts(missing.join(", ")));
    }
    Ok(summary)
}

/// Two-line table: policy identifiers, then final-policy counts, followed by
/// the success rate against the oracle optimum.
pub fn format_summary(summary: &ExperimentSummary) -> String {
    let width = summary
        .histogram
        .iter()
        .map(|c| c.policy.len())
        .max()
        .unwrap_or(0)
        .max(3);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} / {} / alpha {} / {} trials x {} episodes",
        summary.config.agent,
        summary.config.environment,
        summary.config.alpha,
        summary.trials(),
        summary.config.episodes_per_trial
    );
    let mut names = format!("{:<8}", "policy");
    let mut counts = format!("{:<8}", "count");
    for c in &summary.histogram {
        let _ = write!(names, " {:>width$}", c.policy);
        let _ = write!(counts, " {:>width$}", c.count);
    }
    let _ = writeln!(out, "{names}\n{counts}");
    let _ = writeln!(
        out,
        "SER-optimal {} {}: {}/{} trials",
        summary.oracle_optimal.policy,
        summary.oracle_optimal.mean_return,
        summary.success_count,
        summary.trials()
    );
    out
}
