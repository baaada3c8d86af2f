//! Multi-objective Q(λ) over policy options.
//!
//! Each option is one complete deterministic policy. The agent picks an
//! option once, at the start state, and follows it to the end of the
//! episode, learning `Q(s, option)` for the selected option only.

use crate::agents::{Agent, EpisodeParams, GreedyPolicy, TraceParams, Traces};
use crate::error::{Error, Result};
use crate::momdp::{EnvironmentSpec, Next, Step};
use crate::oracle::enumerate_policies;
use crate::reward::RewardVector;
use crate::rng::SeededRng;
use crate::utility::UtilityOrdering;

#[derive(Clone, Debug, PartialEq)]
pub struct OptionTables {
    /// Every deterministic policy, in enumeration order.
    pub options: Vec<GreedyPolicy>,
    /// `Q(s, option)`, indexed `[state][option]`.
    pub q: Vec<Vec<RewardVector>>,
}

impl OptionTables {
    pub fn new(env: &EnvironmentSpec) -> Self {
        let options = enumerate_policies(env);
        let q = vec![
            vec![RewardVector::zeros(env.objective_count()); options.len()];
            env.state_count()
        ];
        OptionTables { options, q }
    }
}

#[derive(Clone, Debug)]
struct Episode {
    params: EpisodeParams,
    option: usize,
    traces: Traces<usize>,
}

#[derive(Clone, Debug)]
pub struct PolicyOptionsAgent {
    ordering: UtilityOrdering,
    trace: TraceParams,
    tables: OptionTables,
    start_state: usize,
    episode: Option<Episode>,
}

impl PolicyOptionsAgent {
    pub fn new(env: &EnvironmentSpec, ordering: UtilityOrdering, trace: TraceParams) -> Self {
        PolicyOptionsAgent {
            ordering,
            trace,
            tables: OptionTables::new(env),
            start_state: env.start_state(),
            episode: None,
        }
    }

    pub fn tables(&self) -> &OptionTables {
        &self.tables
    }

    pub fn tables_mut(&mut self) -> &mut OptionTables {
        &mut self.tables
    }

    /// Each option with its learned value at the start state.
    pub fn start_values(&self) -> Vec<(GreedyPolicy, RewardVector)> {
        self.tables
            .options
            .iter()
            .cloned()
            .zip(self.tables.q[self.start_state].iter().cloned())
            .collect()
    }

    /// Option followed in the current episode.
    pub fn current_option(&self) -> Option<&GreedyPolicy> {
        self.episode
            .as_ref()
            .map(|e| &self.tables.options[e.option])
    }
}

impl Agent for PolicyOptionsAgent {
    fn begin_episode(
        &mut self,
        env: &EnvironmentSpec,
        params: EpisodeParams,
        rng: &mut SeededRng,
    ) -> Result<()> {
        let values = &self.tables.q[env.start_state()];
        let option = self.ordering.softmax_t(values, params.temperature, rng)?;
        self.episode = Some(Episode {
            params,
            option,
            traces: Traces::new(),
        });
        Ok(())
    }

    fn select(&mut self, _: &EnvironmentSpec, state: usize, _: &mut SeededRng) -> Result<usize> {
        let episode = self.episode.as_ref().ok_or(Error::UninitializedEpisode)?;
        Ok(self.tables.options[episode.option].actions[state])
    }

    fn observe(
        &mut self,
        _: &EnvironmentSpec,
        step: &Step,
        done: bool,
        _: &mut SeededRng,
    ) -> Result<()> {
        let episode = self.episode.as_mut().ok_or(Error::UninitializedEpisode)?;
        let option = episode.option;
        let q = &mut self.tables.q;
        let mut delta = &step.reward - &q[step.state][option];
        if let Next::State(next) = step.next {
            if !done {
                delta.add_scaled(&q[next][option], self.trace.gamma);
            }
        }
        episode.traces.visit(step.state);
        let alpha = episode.params.alpha;
        for (s, e) in episode.traces.iter() {
            q[s][option].add_scaled(&delta, alpha * e);
        }
        episode.traces.decay(self.trace.gamma * self.trace.lambda);
        Ok(())
    }

    fn end_episode(&mut self, _: &EnvironmentSpec) -> Result<()> {
        self.episode = None;
        Ok(())
    }

    fn greedy_policy(&self, _: &EnvironmentSpec) -> GreedyPolicy {
        let best = self
            .ordering
            .argbest_unchecked(&self.tables.q[self.start_state]);
        self.tables.options[best].clone()
    }
}
