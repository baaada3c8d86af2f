use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{Agent, BaselineAgent, EpisodeParams, MossAgent, PolicyOptionsAgent};
use crate::error::{Error, Result};
use crate::harness::artifacts::{emit_policy_chart, write_returns, write_summary};
use crate::harness::config::{AgentKind, ExperimentConfig};
use crate::momdp::{run_episode, EnvironmentSpec};
use crate::oracle::{enumerate_policies, ser_optimal};
use crate::reward::RewardVector;
use crate::rng::SeededRng;
use crate::utility::{Schedule, UtilityOrdering};

/// Outcome of one seeded training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub seed: u64,
    /// Greedy policy identifier after each episode.
    pub greedy: Vec<String>,
    pub final_policy: String,
    /// Whether `final_policy` is the oracle's SER-optimal policy.
    pub success: bool,
    /// Return collected in each episode.
    pub returns: Vec<RewardVector>,
}

/// Per-episode log of a training run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingLog {
    pub greedy: Vec<String>,
    pub returns: Vec<RewardVector>,
}

/// Trains `agent` for as many episodes as the schedules cover, recording
/// the greedy policy after every episode.
pub fn train_agent<A: Agent + ?Sized>(
    env: &EnvironmentSpec,
    agent: &mut A,
    alpha: &Schedule,
    temperature: &Schedule,
    rng: &mut SeededRng,
) -> Result<TrainingLog> {
    let episodes = alpha.total_episodes;
    let mut log = TrainingLog {
        greedy: Vec::with_capacity(episodes),
        returns: Vec::with_capacity(episodes),
    };
    for episode in 0..episodes {
        let params = EpisodeParams {
            alpha: alpha.value(episode)?,
            temperature: temperature.value(episode)?,
        };
        let transcript = run_episode(env, agent, params, rng)?;
        log.returns.push(transcript.total_return);
        log.greedy.push(agent.greedy_policy(env).identifier);
    }
    Ok(log)
}

/// A fresh agent of the configured kind.
pub fn make_agent(
    config: &ExperimentConfig,
    env: &EnvironmentSpec,
    ordering: &UtilityOrdering,
) -> Box<dyn Agent + Send> {
    let trace = config.trace_params();
    let ordering = ordering.clone();
    match config.agent {
        AgentKind::Baseline => Box::new(BaselineAgent::new(env, ordering, trace)),
        AgentKind::Moss => Box::new(MossAgent::new(env, ordering, trace)),
        AgentKind::Options => Box::new(PolicyOptionsAgent::new(env, ordering, trace)),
    }
}

/// Environment, ordering and oracle optimum shared by every trial.
#[derive(Clone, Debug)]
struct Setup {
    env: EnvironmentSpec,
    ordering: UtilityOrdering,
    optimal: String,
    optimal_mean: RewardVector,
}

impl Setup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let env = config.load_environment()?;
        let ordering = config.ordering(&env)?;
        let (policy, mean) = ser_optimal(&env, &ordering);
        Ok(Setup {
            env,
            ordering,
            optimal: policy.identifier,
            optimal_mean: mean,
        })
    }

    fn run_trial(&self, config: &ExperimentConfig, trial_index: usize) -> Result<TrialRecord> {
        let seed = config.base_seed.wrapping_add(trial_index as u64);
        let mut rng = SeededRng::new(seed);
        let mut agent = make_agent(config, &self.env, &self.ordering);
        let episodes = config.episodes_per_trial;
        let log = train_agent(
            &self.env,
            &mut agent,
            &config.alpha.schedule(episodes),
            &config.temperature.schedule(episodes),
            &mut rng,
        )?;
        let final_policy = log
            .greedy
            .last()
            .cloned()
            .unwrap_or_else(|| agent.greedy_policy(&self.env).identifier);
        Ok(TrialRecord {
            trial_index,
            seed,
            success: final_policy == self.optimal,
            final_policy,
            greedy: log.greedy,
            returns: log.returns,
        })
    }
}

/// Runs trial `trial_index` of `config`, seeded with `base_seed + trial_index`.
pub fn run_trial(config: &ExperimentConfig, trial_index: usize) -> Result<TrialRecord> {
    Setup::new(config)?.run_trial(config, trial_index)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyCount {
    pub policy: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptimum {
    pub policy: String,
    pub mean_return: RewardVector,
}

/// What `summary.json` holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    /// Final-policy counts for every deterministic policy, in enumeration
    /// order.
    pub histogram: Vec<PolicyCount>,
    pub success_count: usize,
    pub oracle_optimal: OracleOptimum,
    /// Final greedy policy of each trial, by trial index.
    pub final_policies: Vec<String>,
}

impl ExperimentSummary {
    pub fn count(&self, policy: &str) -> usize {
        self.histogram
            .iter()
            .find(|c| c.policy == policy)
            .map_or(0, |c| c.count)
    }

    /// Trials whose final policy matches `predicate`.
    pub fn count_where(&self, predicate: impl Fn(&str) -> bool) -> usize {
        self.final_policies.iter().filter(|p| predicate(p)).count()
    }

    pub fn trials(&self) -> usize {
        self.final_policies.len()
    }

    /// Policies with a non-zero count, in enumeration order.
    pub fn support(&self) -> Vec<&str> {
        self.histogram
            .iter()
            .filter(|c| c.count > 0)
            .map(|c| c.policy.as_str())
            .collect()
    }
}

/// Runs every trial without touching the filesystem.
pub fn run_trials(config: &ExperimentConfig) -> Result<(ExperimentSummary, Vec<TrialRecord>)> {
    let setup = Setup::new(config)?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|k| setup.run_trial(config, k))
        .collect::<Result<_>>()?;
    let histogram = enumerate_policies(&setup.env)
        .into_iter()
        .map(|p| PolicyCount {
            count: records
                .iter()
                .filter(|r| r.final_policy == p.identifier)
                .count(),
            policy: p.identifier,
        })
        .collect();
    let summary = ExperimentSummary {
        config: config.clone(),
        histogram,
        success_count: records.iter().filter(|r| r.success).count(),
        oracle_optimal: OracleOptimum {
            policy: setup.optimal.clone(),
            mean_return: setup.optimal_mean.clone(),
        },
        final_policies: records.iter().map(|r| r.final_policy.clone()).collect(),
    };
    Ok((summary, records))
}

/// Runs every trial and writes per-trial CSVs plus `summary.json` into the
/// configured output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let dir = config.output_dir.as_path();
    prepare_output_dir(dir)?;
    let (summary, records) = run_trials(config)?;
    let env = config.load_environment()?;
    let ordering = config.ordering(&env)?;
    for record in &records {
        let k = record.trial_index;
        emit_policy_chart(
            record,
            &env,
            &ordering,
            dir.join(format!("trial_{k}_chart.csv")),
        )?;
        write_returns(record, dir.join(format!("trial_{k}_returns.csv")))?;
    }
    write_summary(&summary, dir)?;
    Ok(summary)
}

fn prepare_output_dir(dir: &Path) -> Result<()> {
    let not_writable = |source| Error::OutputDirNotWritable {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(not_writable)?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(not_writable)?;
    fs::remove_file(&probe).map_err(not_writable)
}
