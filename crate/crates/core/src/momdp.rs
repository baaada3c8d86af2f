//! MOMDP data model, validation and seeded sampling of environment dynamics.
//!
//! Environments are written as [`SpecDocument`]s (the JSON file schema, with
//! states referenced by name) and turned into an indexed [`EnvironmentSpec`]
//! by [`validate_spec`]. A validated spec is immutable and can be shared
//! freely between concurrently running trials.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agents::{Agent, EpisodeParams};
use crate::error::{Error, Result, SpecViolation, ValidationErrors};
use crate::reward::RewardVector;
use crate::rng::SeededRng;

/// `next` value marking a successful terminal transition.
pub const SUCCESS_SENTINEL: &str = "$success";
/// `next` value marking a failed terminal transition.
pub const FAILURE_SENTINEL: &str = "$failure";

const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// On-disk environment definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub name: String,
    pub states: Vec<String>,
    pub start_state: String,
    pub horizon: usize,
    pub objectives: Vec<String>,
    pub dynamics: Vec<DynamicsEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsEntry {
    pub state: String,
    pub action: String,
    pub initial: String,
    pub outcomes: Vec<OutcomeEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    pub p: f64,
    pub next: String,
    pub reward: RewardVector,
}

/// Where a transition lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Next {
    State(usize),
    Success,
    Failure,
}

impl Next {
    pub fn is_terminal(self) -> bool {
        !matches!(self, Next::State(_))
    }

    pub fn state(self) -> Option<usize> {
        match self {
            Next::State(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub next: Next,
    pub reward: RewardVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionInfo {
    pub name: String,
    pub initial: char,
}

/// A validated stochastic MOMDP with a single start state.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentSpec {
    name: String,
    states: Vec<String>,
    actions: Vec<Vec<ActionInfo>>,
    outcomes: Vec<Vec<Vec<Outcome>>>,
    start_state: usize,
    horizon: usize,
    objectives: Vec<String>,
}

impl EnvironmentSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn actions(&self, state: usize) -> &[ActionInfo] {
        &self.actions[state]
    }

    pub fn action_count(&self, state: usize) -> usize {
        self.actions[state].len()
    }

    pub fn action_index(&self, state: usize, initial: char) -> Option<usize> {
        self.actions
            .get(state)?
            .iter()
            .position(|a| a.initial == initial)
    }

    pub fn start_state(&self) -> usize {
        self.start_state
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn objectives(&self) -> &[String] {
        &self.objectives
    }

    pub fn objective_count(&self) -> usize {
        self.objectives.len()
    }

    pub fn outcomes(&self, state: usize, action: usize) -> Result<&[Outcome]> {
        self.outcomes
            .get(state)
            .and_then(|per_state| per_state.get(action))
            .map(Vec::as_slice)
            .ok_or(Error::UnknownStateAction { state, action })
    }

    /// Expected immediate reward of `(state, action)`.
    pub fn mean_reward(&self, state: usize, action: usize) -> Result<RewardVector> {
        let mut mean = RewardVector::zeros(self.objective_count());
        for o in self.outcomes(state, action)? {
            mean.add_scaled(&o.reward, o.probability);
        }
        Ok(mean)
    }

    /// Outcome selected by the uniform draw `u` via inverse CDF over the
    /// outcomes in declaration order.
    pub fn outcome_for_draw(&self, state: usize, action: usize, u: f64) -> Result<&Outcome> {
        let outcomes = self.outcomes(state, action)?;
        let mut cumulative = 0.0;
        for o in outcomes {
            cumulative += o.probability;
            if u < cumulative {
                return Ok(o);
            }
        }
        // u landed in the rounding gap above the last cumulative sum.
        Ok(outcomes
            .iter()
            .rev()
            .find(|o| o.probability > 0.0)
            .unwrap_or(&outcomes[outcomes.len() - 1]))
    }

    /// Identifier of a deterministic policy: the chosen actions' initials in
    /// state order.
    pub fn policy_identifier(&self, actions: &[usize]) -> String {
        actions
            .iter()
            .enumerate()
            .map(|(s, &a)| self.actions[s][a].initial)
            .collect()
    }

    /// Inverse of [`policy_identifier`](Self::policy_identifier).
    pub fn parse_policy(&self, identifier: &str) -> Option<Vec<usize>> {
        let chars: Vec<char> = identifier.chars().collect();
        if chars.len() != self.state_count() {
            return None;
        }
        chars
            .iter()
            .enumerate()
            .map(|(s, &c)| self.action_index(s, c))
            .collect()
    }

    pub fn to_document(&self) -> SpecDocument {
        let next_name = |next: Next| match next {
            Next::State(s) => self.states[s].clone(),
            Next::Success => SUCCESS_SENTINEL.to_string(),
            Next::Failure => FAILURE_SENTINEL.to_string(),
        };
        let mut dynamics = Vec::new();
        for (s, actions) in self.actions.iter().enumerate() {
            for (a, info) in actions.iter().enumerate() {
                dynamics.push(DynamicsEntry {
                    state: self.states[s].clone(),
                    action: info.name.clone(),
                    initial: info.initial.to_string(),
                    outcomes: self.outcomes[s][a]
                        .iter()
                        .map(|o| OutcomeEntry {
                            p: o.probability,
                            next: next_name(o.next),
                            reward: o.reward.clone(),
                        })
                        .collect(),
                });
            }
        }
        SpecDocument {
            name: self.name.clone(),
            states: self.states.clone(),
            start_state: self.states[self.start_state].clone(),
            horizon: self.horizon,
            objectives: self.objectives.clone(),
            dynamics,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("spec documents always serialize")
    }
}

/// Checks every environment invariant and builds the indexed spec.
///
/// Returns the complete list of violations on failure.
pub fn validate_spec(doc: &SpecDocument) -> std::result::Result<EnvironmentSpec, ValidationErrors> {
    let mut errors = Vec::new();

    if doc.states.is_empty() {
        errors.push(SpecViolation::EmptyStates);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, s) in doc.states.iter().enumerate() {
        if index.insert(s.as_str(), i).is_some() {
            errors.push(SpecViolation::DuplicateState(s.clone()));
        }
    }
    let start_state = index.get(doc.start_state.as_str()).copied();
    if start_state.is_none() {
        errors.push(SpecViolation::MissingStartState(doc.start_state.clone()));
    }
    if doc.horizon == 0 {
        errors.push(SpecViolation::ZeroHorizon);
    }
    let objectives = doc.objectives.len();
    if objectives == 0 {
        errors.push(SpecViolation::NoObjectives);
    }

    let mut actions: Vec<Vec<ActionInfo>> = vec![Vec::new(); doc.states.len()];
    let mut outcomes: Vec<Vec<Vec<Outcome>>> = vec![Vec::new(); doc.states.len()];
    let mut initials: Vec<HashSet<char>> = vec![HashSet::new(); doc.states.len()];

    for entry in &doc.dynamics {
        let Some(&s) = index.get(entry.state.as_str()) else {
            errors.push(SpecViolation::UnknownState(entry.state.clone()));
            continue;
        };
        if actions[s].iter().any(|a| a.name == entry.action) {
            errors.push(SpecViolation::DuplicateAction {
                state: entry.state.clone(),
                action: entry.action.clone(),
            });
            continue;
        }

        let mut chars = entry.initial.chars();
        let initial = match (chars.next(), chars.next()) {
            (Some(c), None) => Some(c),
            _ => {
                errors.push(SpecViolation::BadInitial {
                    state: entry.state.clone(),
                    action: entry.action.clone(),
                    initial: entry.initial.clone(),
                });
                None
            }
        };
        if let Some(c) = initial {
            if !initials[s].insert(c) {
                errors.push(SpecViolation::DuplicateActionInitial {
                    state: entry.state.clone(),
                    initial: entry.initial.clone(),
                });
            }
        }

        let mut sum = 0.0;
        let mut resolved = Vec::with_capacity(entry.outcomes.len());
        for o in &entry.outcomes {
            if !(0.0..=1.0).contains(&o.p) {
                errors.push(SpecViolation::ProbabilityRange {
                    state: entry.state.clone(),
                    action: entry.action.clone(),
                    p: o.p,
                });
            }
            sum += o.p;
            if o.reward.len() != objectives {
                errors.push(SpecViolation::RewardDimension {
                    state: entry.state.clone(),
                    action: entry.action.clone(),
                    expected: objectives,
                    found: o.reward.len(),
                });
            }
            let next = match o.next.as_str() {
                SUCCESS_SENTINEL => Some(Next::Success),
                FAILURE_SENTINEL => Some(Next::Failure),
                name => index.get(name).map(|&n| Next::State(n)),
            };
            match next {
                Some(next) => resolved.push(Outcome {
                    probability: o.p,
                    next,
                    reward: o.reward.clone(),
                }),
                None => errors.push(SpecViolation::DanglingState {
                    state: entry.state.clone(),
                    action: entry.action.clone(),
                    next: o.next.clone(),
                }),
            }
        }
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            errors.push(SpecViolation::ProbabilitySum {
                state: entry.state.clone(),
                action: entry.action.clone(),
                sum,
            });
        }

        actions[s].push(ActionInfo {
            name: entry.action.clone(),
            initial: initial.unwrap_or('?'),
        });
        outcomes[s].push(resolved);
    }

    for (s, name) in doc.states.iter().enumerate() {
        if actions[s].is_empty() {
            errors.push(SpecViolation::StateWithoutActions(name.clone()));
        }
    }

    match (errors.is_empty(), start_state) {
        (true, Some(start_state)) => Ok(EnvironmentSpec {
            name: doc.name.clone(),
            states: doc.states.clone(),
            actions,
            outcomes,
            start_state,
            horizon: doc.horizon,
            objectives: doc.objectives.clone(),
        }),
        _ => Err(ValidationErrors(errors)),
    }
}

/// Draws one outcome of `(state, action)` and advances `rng` by one draw.
pub fn sample_outcome<'a>(
    spec: &'a EnvironmentSpec,
    state: usize,
    action: usize,
    rng: &mut SeededRng,
) -> Result<&'a Outcome> {
    spec.outcomes(state, action)?;
    let u = rng.uniform();
    spec.outcome_for_draw(state, action, u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub reward: RewardVector,
    pub next: Next,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Success,
    Failure,
    Horizon,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Success => "SUCCESS",
            Termination::Failure => "FAILURE",
            Termination::Horizon => "HORIZON",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeTranscript {
    pub steps: Vec<Step>,
    /// Undiscounted sum of step rewards.
    pub total_return: RewardVector,
    pub terminated_by: Termination,
}

/// Runs one episode, driving the agent's callbacks.
///
/// The episode ends on a terminal sentinel or after `horizon` steps; in the
/// second case the agent sees `done = true` on the last step.
pub fn run_episode<A: Agent + ?Sized>(
    spec: &EnvironmentSpec,
    agent: &mut A,
    params: EpisodeParams,
    rng: &mut SeededRng,
) -> Result<EpisodeTranscript> {
    agent.begin_episode(spec, params, rng)?;
    let mut state = spec.start_state();
    let mut steps = Vec::with_capacity(spec.horizon());
    let mut total_return = RewardVector::zeros(spec.objective_count());
    let terminated_by = loop {
        let action = agent.select(spec, state, rng)?;
        let outcome = sample_outcome(spec, state, action, rng)?;
        let step = Step {
            state,
            action,
            reward: outcome.reward.clone(),
            next: outcome.next,
        };
        total_return += &step.reward;
        let termination = match outcome.next {
            Next::Success => Some(Termination::Success),
            Next::Failure => Some(Termination::Failure),
            Next::State(_) if steps.len() + 1 >= spec.horizon() => Some(Termination::Horizon),
            Next::State(_) => None,
        };
        agent.observe(spec, &step, termination.is_some(), rng)?;
        steps.push(step);
        match (termination, outcome.next) {
            (Some(t), _) => break t,
            (None, Next::State(next)) => state = next,
            (None, _) => unreachable!("terminal outcomes always terminate"),
        }
    };
    agent.end_episode(spec)?;
    Ok(EpisodeTranscript {
        steps,
        total_return,
        terminated_by,
    })
}
