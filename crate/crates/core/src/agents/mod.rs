//! Value-based multi-objective Q(λ) agents.
//!
//! Every agent implements [`Agent`]; [`run_episode`](crate::momdp::run_episode)
//! drives the callbacks in order `begin_episode`, then `select`/`observe` per
//! step, then `end_episode`.

mod baseline;
mod moss;
mod options;

pub use baseline::{AugmentedStateKey, BaselineAgent, BaselineTables};
pub use moss::{MossAgent, MossTables};
pub use options::{OptionTables, PolicyOptionsAgent};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::momdp::{EnvironmentSpec, Step};
use crate::rng::SeededRng;

/// Values of the scheduled hyperparameters for one episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeParams {
    pub alpha: f64,
    pub temperature: f64,
}

/// Fixed Q(λ) hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    pub gamma: f64,
    pub lambda: f64,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            gamma: 1.0,
            lambda: 0.95,
        }
    }
}

/// A deterministic policy: one action per non-terminal state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GreedyPolicy {
    pub identifier: String,
    pub actions: Vec<usize>,
}

impl GreedyPolicy {
    pub fn new(env: &EnvironmentSpec, actions: Vec<usize>) -> Self {
        GreedyPolicy {
            identifier: env.policy_identifier(&actions),
            actions,
        }
    }
}

impl fmt::Display for GreedyPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.identifier)
    }
}

pub trait Agent {
    /// Resets per-episode state and picks the first action.
    fn begin_episode(
        &mut self,
        env: &EnvironmentSpec,
        params: EpisodeParams,
        rng: &mut SeededRng,
    ) -> Result<()>;

    /// Action to execute in `state`, the state the episode is currently in.
    fn select(&mut self, env: &EnvironmentSpec, state: usize, rng: &mut SeededRng)
        -> Result<usize>;

    /// Learns from one transition. `done` is set when the episode ends after
    /// this step, either at a terminal sentinel or at the horizon.
    fn observe(
        &mut self,
        env: &EnvironmentSpec,
        step: &Step,
        done: bool,
        rng: &mut SeededRng,
    ) -> Result<()>;

    fn end_episode(&mut self, env: &EnvironmentSpec) -> Result<()>;

    /// Greedy policy under the current estimates. Never changes the agent.
    fn greedy_policy(&self, env: &EnvironmentSpec) -> GreedyPolicy;
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn begin_episode(
        &mut self,
        env: &EnvironmentSpec,
        params: EpisodeParams,
        rng: &mut SeededRng,
    ) -> Result<()> {
        (**self).begin_episode(env, params, rng)
    }

    fn select(
        &mut self,
        env: &EnvironmentSpec,
        state: usize,
        rng: &mut SeededRng,
    ) -> Result<usize> {
        (**self).select(env, state, rng)
    }

    fn observe(
        &mut self,
        env: &EnvironmentSpec,
        step: &Step,
        done: bool,
        rng: &mut SeededRng,
    ) -> Result<()> {
        (**self).observe(env, step, done, rng)
    }

    fn end_episode(&mut self, env: &EnvironmentSpec) -> Result<()> {
        (**self).end_episode(env)
    }

    fn greedy_policy(&self, env: &EnvironmentSpec) -> GreedyPolicy {
        (**self).greedy_policy(env)
    }
}

/// Follows a fixed deterministic policy and learns nothing.
#[derive(Clone, Debug)]
pub struct FixedPolicyAgent {
    actions: Vec<usize>,
}

impl FixedPolicyAgent {
    pub fn new(actions: Vec<usize>) -> Self {
        FixedPolicyAgent { actions }
    }
}

impl Agent for FixedPolicyAgent {
    fn begin_episode(
        &mut self,
        _: &EnvironmentSpec,
        _: EpisodeParams,
        _: &mut SeededRng,
    ) -> Result<()> {
        Ok(())
    }

    fn select(&mut self, _: &EnvironmentSpec, state: usize, _: &mut SeededRng) -> Result<usize> {
        Ok(self.actions[state])
    }

    fn observe(&mut self, _: &EnvironmentSpec, _: &Step, _: bool, _: &mut SeededRng) -> Result<()> {
        Ok(())
    }

    fn end_episode(&mut self, _: &EnvironmentSpec) -> Result<()> {
        Ok(())
    }

    fn greedy_policy(&self, env: &EnvironmentSpec) -> GreedyPolicy {
        GreedyPolicy::new(env, self.actions.clone())
    }
}

/// Replacing eligibility traces over table entries of type `K`.
///
/// Only entries touched during the current episode are stored, so updating
/// "every state and action" walks at most one entry per step taken.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Traces<K> {
    entries: Vec<(K, f64)>,
}

impl<K: PartialEq + Copy> Traces<K> {
    pub fn new() -> Self {
        Traces {
            entries: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Sets the trace of `key` to 1.
    pub fn visit(&mut self, key: K) {
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = 1.0,
            None => self.entries.push((key, 1.0)),
        }
    }

    pub fn decay(&mut self, factor: f64) {
        for (_, e) in &mut self.entries {
            *e *= factor;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (K, f64)> + '_ {
        self.entries.iter().copied()
    }
}
