use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// One broken invariant in an environment definition.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum SpecViolation {
    #[error("environment declares no states")]
    EmptyStates,
    #[error("start state `{0}` is not a declared state")]
    MissingStartState(String),
    #[error("state `{0}` is declared more than once")]
    DuplicateState(String),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("environment declares no objectives")]
    NoObjectives,
    #[error("state `{0}` has no actions")]
    StateWithoutActions(String),
    #[error("dynamics entry refers to unknown state `{0}`")]
    UnknownState(String),
    #[error("({state}, {action}) leads to unknown state `{next}`")]
    DanglingState {
        state: String,
        action: String,
        next: String,
    },
    #[error("({state}, {action}) outcome probabilities sum to {sum}, expected 1")]
    ProbabilitySum {
        state: String,
        action: String,
        sum: f64,
    },
    #[error("({state}, {action}) has outcome probability {p} outside [0, 1]")]
    ProbabilityRange {
        state: String,
        action: String,
        p: f64,
    },
    #[error("action `{action}` appears twice in state `{state}`")]
    DuplicateAction { state: String, action: String },
    #[error("initial `{initial}` is used by more than one action in state `{state}`")]
    DuplicateActionInitial { state: String, initial: String },
    #[error("action `{action}` in state `{state}` needs a one-character initial, got `{initial}`")]
    BadInitial {
        state: String,
        action: String,
        initial: String,
    },
    #[error("({state}, {action}) reward has {found} components, expected {expected}")]
    RewardDimension {
        state: String,
        action: String,
        expected: usize,
        found: usize,
    },
}

/// Every violation found while validating an environment, not just the first.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationErrors(pub Vec<SpecViolation>);

impl ValidationErrors {
    pub fn violations(&self) -> &[SpecViolation] {
        &self.0
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s): ", self.0.len())?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid environment: {0}")]
    Validation(#[from] ValidationErrors),
    #[error("unknown state/action pair ({state}, {action})")]
    UnknownStateAction { state: usize, action: usize },
    #[error("agent observed a transition outside an episode")]
    UninitializedEpisode,
    #[error("no candidates to choose from")]
    EmptyCandidates,
    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),
    #[error("expected {expected} objectives, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("episode {episode} is outside a schedule of {total} episodes")]
    EpisodeOutOfRange { episode: usize, total: usize },
    #[error("global statistics need at least one episode")]
    ZeroEpisodes,
    #[error("unknown environment `{0}`")]
    UnknownEnvironment(String),
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("output directory {path} is not writable: {source}")]
    OutputDirNotWritable { path: PathBuf, source: io::Error },
    #[error("missing artifacts: {0}")]
    MissingArtifacts(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(err: &serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
