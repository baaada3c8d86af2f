use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::TraceParams;
use crate::environments;
use crate::error::{Error, Result};
use crate::momdp::EnvironmentSpec;
use crate::utility::{Schedule, ScheduleKind, UtilityOrdering};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Baseline,
    Moss,
    Options,
}

impl AgentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Baseline => "baseline",
            AgentKind::Moss => "moss",
            AgentKind::Options => "options",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(AgentKind::Baseline),
            "moss" => Ok(AgentKind::Moss),
            "options" => Ok(AgentKind::Options),
            other => Err(Error::InvalidConfig(format!(
                "unknown agent `{other}` (expected baseline, moss or options)"
            ))),
        }
    }
}

/// A schedule without its length, as written in configs and on the command
/// line (`constant:0.01`, `linear:10:2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_value: f64,
}

impl ScheduleSpec {
    pub fn constant(value: f64) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::Constant,
            initial: value,
            final_value: value,
        }
    }

    pub fn linear(initial: f64, final_value: f64) -> Self {
        ScheduleSpec {
            kind: ScheduleKind::LinearDecay,
            initial,
            final_value,
        }
    }

    pub fn schedule(&self, total_episodes: usize) -> Schedule {
        match self.kind {
            ScheduleKind::Constant => Schedule::constant(self.initial, total_episodes),
            ScheduleKind::LinearDecay => {
                Schedule::linear(self.initial, self.final_value, total_episodes)
            }
        }
    }

    fn bounds(&self) -> (f64, f64) {
        (
            self.initial.min(self.final_value),
            self.initial.max(self.final_value),
        )
    }
}

impl fmt::Display for ScheduleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ScheduleKind::Constant => write!(f, "constant:{}", self.initial),
            ScheduleKind::LinearDecay => write!(f, "linear:{}:{}", self.initial, self.final_value),
        }
    }
}

impl FromStr for ScheduleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("bad schedule `{s}`"));
        let number = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["constant", v] => Ok(ScheduleSpec::constant(number(v)?)),
            ["linear", a, b] => Ok(ScheduleSpec::linear(number(a)?, number(b)?)),
            _ => Err(bad()),
        }
    }
}

/// Everything needed to reproduce one experiment.
///
/// Missing fields take their defaults, so `{}` is a valid config. The output
/// directory is never written to `summary.json`, which keeps summaries of
/// the same experiment identical wherever they are stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Built-in variant name or path to a JSON environment.
    pub environment: String,
    pub agent: AgentKind,
    pub alpha: ScheduleSpec,
    pub temperature: ScheduleSpec,
    pub lambda: f64,
    pub gamma: f64,
    /// Thresholds for every objective but the last. `None` uses the
    /// variant's default threshold.
    pub thresholds: Option<Vec<f64>>,
    pub trials: usize,
    pub episodes_per_trial: usize,
    pub base_seed: u64,
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let trace = TraceParams::default();
        ExperimentConfig {
            environment: "original".to_string(),
            agent: AgentKind::Baseline,
            alpha: ScheduleSpec::constant(0.01),
            temperature: ScheduleSpec::linear(10.0, 2.0),
            lambda: trace.lambda,
            gamma: trace.gamma,
            thresholds: None,
            trials: 20,
            episodes_per_trial: 20_000,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(json).map_err(|e| Error::parse(&e))?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn trace_params(&self) -> TraceParams {
        TraceParams {
            gamma: self.gamma,
            lambda: self.lambda,
        }
    }

    pub fn load_environment(&self) -> Result<EnvironmentSpec> {
        environments::resolve(&self.environment)
    }

    pub fn ordering(&self, env: &EnvironmentSpec) -> Result<UtilityOrdering> {
        let thresholds = match &self.thresholds {
            Some(t) => t.clone(),
            None => vec![environments::default_threshold(&self.environment)],
        };
        if thresholds.len() + 1 != env.objective_count() {
            return Err(Error::InvalidConfig(format!(
                "{} threshold(s) given for {} objectives; expected one per objective except the last",
                thresholds.len(),
                env.objective_count()
            )));
        }
        Ok(UtilityOrdering::new(thresholds))
    }

    /// Checks ranges that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidConfig(m));
        if self.trials == 0 {
            return invalid("trials must be positive".into());
        }
        if self.episodes_per_trial == 0 {
            return invalid("episodes_per_trial must be positive".into());
        }
        let (lo, hi) = self.alpha.bounds();
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
            return invalid(format!("alpha schedule {} leaves [0, 1]", self.alpha));
        }
        let (lo, _) = self.temperature.bounds();
        if lo.is_nan() || lo <= 0.0 {
            return invalid(format!(
                "temperature schedule {} must stay positive",
                self.temperature
            ));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return invalid(format!("lambda {} is outside [0, 1]", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return invalid(format!("gamma {} is outside [0, 1]", self.gamma));
        }
        if let Some(t) = &self.thresholds {
            if t.iter().any(|x| !x.is_finite()) {
                return invalid("thresholds must be finite".into());
            }
        }
        Ok(())
    }
}
