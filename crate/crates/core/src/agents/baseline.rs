//! Multi-objective Q(λ) conditioned on the accumulated expected reward.
//!
//! The agent keeps an estimate `I(s, a)` of each pair's immediate reward and
//! sums those estimates along the episode into `P`. Actions are ranked on
//! `U(a) = P + Q(s, a)`. Q-values are keyed by the base state together with
//! the (state, action) prefix taken so far in the episode: in a finite
//! horizon task the prefix makes exactly the distinctions `P` is meant to
//! carry, while staying a stable, finite table key as the `I` estimates drift.

use std::collections::HashMap;

use crate::agents::{Agent, EpisodeParams, GreedyPolicy, TraceParams, Traces};
use crate::error::{Error, Result};
use crate::momdp::{EnvironmentSpec, Next, Step};
use crate::reward::RewardVector;
use crate::rng::SeededRng;
use crate::utility::UtilityOrdering;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AugmentedStateKey {
    pub base_state: usize,
    /// `(state, action)` pairs taken earlier in the episode.
    pub trajectory: Vec<(usize, usize)>,
}

/// Learned tables of the baseline agent.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineTables {
    index: HashMap<AugmentedStateKey, usize>,
    keys: Vec<AugmentedStateKey>,
    q: Vec<Vec<RewardVector>>,
    immediate: Vec<Vec<RewardVector>>,
    objectives: usize,
}

impl BaselineTables {
    pub fn new(env: &EnvironmentSpec) -> Self {
        let objectives = env.objective_count();
        BaselineTables {
            index: HashMap::new(),
            keys: Vec::new(),
            q: Vec::new(),
            immediate: (0..env.state_count())
                .map(|s| vec![RewardVector::zeros(objectives); env.action_count(s)])
                .collect(),
            objectives,
        }
    }

    fn intern(&mut self, env: &EnvironmentSpec, key: AugmentedStateKey) -> usize {
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.keys.len();
        self.q.push(vec![
            RewardVector::zeros(self.objectives);
            env.action_count(key.base_state)
        ]);
        self.index.insert(key.clone(), id);
        self.keys.push(key);
        id
    }

    pub fn key_count(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[AugmentedStateKey] {
        &self.keys
    }

    /// Q-vector of every action at `key`; `None` for keys never visited.
    pub fn q_values(&self, key: &AugmentedStateKey) -> Option<&[RewardVector]> {
        self.index.get(key).map(|&id| self.q[id].as_slice())
    }

    /// Overwrites the Q-vectors at `key`, creating the key if needed.
    pub fn set_q_values(
        &mut self,
        env: &EnvironmentSpec,
        key: AugmentedStateKey,
        values: Vec<RewardVector>,
    ) {
        let id = self.intern(env, key);
        self.q[id] = values;
    }

    /// Estimated immediate reward `I(state, action)`.
    pub fn immediate(&self, state: usize, action: usize) -> &RewardVector {
        &self.immediate[state][action]
    }

    pub fn set_immediate(&mut self, state: usize, action: usize, value: RewardVector) {
        self.immediate[state][action] = value;
    }

    /// `U(a) = P + Q(key, a)`; unseen keys count as all-zero Q.
    fn utilities(
        &self,
        env: &EnvironmentSpec,
        key: &AugmentedStateKey,
        accumulated: &RewardVector,
    ) -> Vec<RewardVector> {
        match self.index.get(key) {
            Some(&id) => self.q[id].iter().map(|q| accumulated + q).collect(),
            None => vec![accumulated.clone(); env.action_count(key.base_state)],
        }
    }
}

#[derive(Clone, Debug)]
struct Episode {
    params: EpisodeParams,
    key: AugmentedStateKey,
    key_id: usize,
    accumulated: RewardVector,
    traces: Traces<(usize, usize)>,
    pending: Option<usize>,
}

/// Multi-objective Q(λ) with accumulated expected reward (the baseline).
#[derive(Clone, Debug)]
pub struct BaselineAgent {
    ordering: UtilityOrdering,
    trace: TraceParams,
    tables: BaselineTables,
    episode: Option<Episode>,
}

impl BaselineAgent {
    pub fn new(env: &EnvironmentSpec, ordering: UtilityOrdering, trace: TraceParams) -> Self {
        BaselineAgent {
            ordering,
            trace,
            tables: BaselineTables::new(env),
            episode: None,
        }
    }

    pub fn tables(&self) -> &BaselineTables {
        &self.tables
    }

    pub fn tables_mut(&mut self) -> &mut BaselineTables {
        &mut self.tables
    }

    /// Trace values of the current episode, keyed by `(key id, action)`.
    pub fn traces(&self) -> Vec<((usize, usize), f64)> {
        self.episode
            .as_ref()
            .map(|e| e.traces.iter().collect())
            .unwrap_or_default()
    }

    /// Accumulated expected reward `P` of the current episode.
    pub fn accumulated(&self) -> Option<&RewardVector> {
        self.episode.as_ref().map(|e| &e.accumulated)
    }

    fn walk(
        &self,
        env: &EnvironmentSpec,
        key: AugmentedStateKey,
        accumulated: RewardVector,
        expand_all: bool,
        chosen: &mut [Option<usize>],
    ) {
        if chosen.iter().all(Option::is_some) && expand_all {
            return;
        }
        let state = key.base_state;
        let greedy =
            self.ordering
                .argbest_unchecked(&self.tables.utilities(env, &key, &accumulated));
        chosen[state].get_or_insert(greedy);
        if key.trajectory.len() + 1 >= env.horizon() {
            return;
        }
        let actions: Vec<usize> = if expand_all {
            (0..env.action_count(state)).collect()
        } else {
            vec![greedy]
        };
        for action in actions {
            let next_accumulated = &accumulated + self.tables.immediate(state, action);
            let mut seen = Vec::new();
            for outcome in env.outcomes(state, action).expect("indices come from env") {
                let Next::State(next) = outcome.next else {
                    continue;
                };
                if outcome.probability <= 0.0 || seen.contains(&next) {
                    continue;
                }
                seen.push(next);
                let mut trajectory = key.trajectory.clone();
                trajectory.push((state, action));
                let next_key = AugmentedStateKey {
                    base_state: next,
                    trajectory,
                };
                self.walk(env, next_key, next_accumulated.clone(), expand_all, chosen);
            }
        }
    }
}

impl Agent for BaselineAgent {
    fn begin_episode(
        &mut self,
        env: &EnvironmentSpec,
        params: EpisodeParams,
        rng: &mut SeededRng,
    ) -> Result<()> {
        let key = AugmentedStateKey {
            base_state: env.start_state(),
            trajectory: Vec::new(),
        };
        let key_id = self.tables.intern(env, key.clone());
        let accumulated = RewardVector::zeros(env.objective_count());
        let utilities = self.tables.utilities(env, &key, &accumulated);
        let first = self
            .ordering
            .softmax_t(&utilities, params.temperature, rng)?;
        self.episode = Some(Episode {
            params,
            key,
            key_id,
            accumulated,
            traces: Traces::new(),
            pending: Some(first),
        });
        Ok(())
    }

    fn select(&mut self, _: &EnvironmentSpec, state: usize, _: &mut SeededRng) -> Result<usize> {
        let episode = self.episode.as_mut().ok_or(Error::UninitializedEpisode)?;
        if episode.key.base_state != state {
            return Err(Error::UninitializedEpisode);
        }
        episode.pending.ok_or(Error::UninitializedEpisode)
    }

    fn observe(
        &mut self,
        env: &EnvironmentSpec,
        step: &Step,
        done: bool,
        rng: &mut SeededRng,
    ) -> Result<()> {
        let episode = self.episode.as_mut().ok_or(Error::UninitializedEpisode)?;
        let tables = &mut self.tables;
        let alpha = episode.params.alpha;

        tables.immediate[step.state][step.action].move_towards(&step.reward, alpha);
        episode.accumulated += &tables.immediate[step.state][step.action];

        let current = (episode.key_id, step.action);
        let mut delta = &step.reward - &tables.q[current.0][current.1];

        let next_state = match step.next {
            Next::State(s) if !done => Some(s),
            _ => None,
        };
        let mut continue_traces = true;
        if let Some(next_state) = next_state {
            let mut trajectory = std::mem::take(&mut episode.key.trajectory);
            trajectory.push((step.state, step.action));
            let next_key = AugmentedStateKey {
                base_state: next_state,
                trajectory,
            };
            let next_id = tables.intern(env, next_key.clone());
            let utilities = tables.utilities(env, &next_key, &episode.accumulated);
            let greedy = self.ordering.argbest_unchecked(&utilities);
            let explore = self
                .ordering
                .softmax_t(&utilities, episode.params.temperature, rng)?;
            delta.add_scaled(&tables.q[next_id][greedy], self.trace.gamma);
            continue_traces = explore == greedy;
            episode.key = next_key;
            episode.key_id = next_id;
            episode.pending = Some(explore);
        } else {
            episode.pending = None;
        }

        episode.traces.visit(current);
        for ((k, a), e) in episode.traces.iter() {
            tables.q[k][a].add_scaled(&delta, alpha * e);
        }
        if continue_traces {
            episode.traces.decay(self.trace.gamma * self.trace.lambda);
        } else {
            episode.traces.clear();
        }
        Ok(())
    }

    fn end_episode(&mut self, _: &EnvironmentSpec) -> Result<()> {
        self.episode = None;
        Ok(())
    }

    /// Walks the greedy tree from the start key with `P` accumulated from the
    /// `I` estimates. States the greedy tree never reaches take the greedy
    /// action at the first prefix that reaches them in a depth-first
    /// expansion of all actions.
    fn greedy_policy(&self, env: &EnvironmentSpec) -> GreedyPolicy {
        let mut chosen = vec![None; env.state_count()];
        let start = AugmentedStateKey {
            base_state: env.start_state(),
            trajectory: Vec::new(),
        };
        let zero = RewardVector::zeros(env.objective_count());
        self.walk(env, start.clone(), zero.clone(), false, &mut chosen);
        if chosen.iter().any(Option::is_none) {
            self.walk(env, start, zero, true, &mut chosen);
        }
        GreedyPolicy::new(env, chosen.into_iter().map(|a| a.unwrap_or(0)).collect())
    }
}
