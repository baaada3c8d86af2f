//! Multi-objective stochastic state Q(λ) (MOSS).
//!
//! On top of the baseline update, MOSS tracks global per-episode statistics:
//! how often each state is visited, the mean return of all episodes and of
//! episodes visiting each state. Action values at a state are blended with
//! the estimated return of the episodes that never reach it, so selection
//! accounts for trajectories other than the current one. The accumulator `P`
//! sums actual rewards. Q is keyed by base state: the per-state running mean
//! `P(s)` would add no distinctions to the key.

use crate::agents::{Agent, EpisodeParams, GreedyPolicy, TraceParams, Traces};
use crate::error::{Error, Result};
use crate::momdp::{EnvironmentSpec, Next, Step};
use crate::reward::RewardVector;
use crate::rng::SeededRng;
use crate::utility::UtilityOrdering;

#[derive(Clone, Debug, PartialEq)]
pub struct MossTables {
    /// `Q(s, a)`.
    pub q: Vec<Vec<RewardVector>>,
    /// `P(s)`: running mean of the reward accumulated when `s` is reached.
    pub state_prefix: Vec<RewardVector>,
    /// `v(s)`: number of episodes that visited `s`.
    pub visits: Vec<u64>,
    /// `E(s)`: running mean return of episodes that visited `s`.
    pub state_return: Vec<RewardVector>,
    /// `E_π`: running mean return over all episodes.
    pub episode_return: RewardVector,
    /// `v_π`: number of episodes started.
    pub episodes: u64,
}

impl MossTables {
    pub fn new(env: &EnvironmentSpec) -> Self {
        let n = env.objective_count();
        let states = env.state_count();
        MossTables {
            q: (0..states)
                .map(|s| vec![RewardVector::zeros(n); env.action_count(s)])
                .collect(),
            state_prefix: vec![RewardVector::zeros(n); states],
            visits: vec![0; states],
            state_return: vec![RewardVector::zeros(n); states],
            episode_return: RewardVector::zeros(n),
            episodes: 0,
        }
    }

    /// Estimated probability that an episode visits `state`.
    pub fn visit_probability(&self, state: usize) -> Result<f64> {
        if self.episodes == 0 {
            return Err(Error::ZeroEpisodes);
        }
        Ok(self.visits[state] as f64 / self.episodes as f64)
    }

    /// Estimated mean return of episodes that never visit `state`:
    /// `(E_π - p E(s)) / (1 - p)`. `None` when `p = 1`.
    pub fn return_without(&self, state: usize) -> Result<Option<RewardVector>> {
        let p = self.visit_probability(state)?;
        if self.visits[state] == self.episodes {
            return Ok(None);
        }
        let mut out = self.episode_return.clone();
        out.add_scaled(&self.state_return[state], -p);
        Ok(Some(out.scaled(1.0 / (1.0 - p))))
    }

    /// Utility vector `U(a)` of every action at `state` from the current
    /// statistics, without changing them.
    pub fn utilities(&self, state: usize) -> Result<Vec<RewardVector>> {
        let p = self.visit_probability(state)?;
        let prefix = &self.state_prefix[state];
        let local = self.q[state].iter().map(|q| prefix + q);
        Ok(match self.return_without(state)? {
            None => local.collect(),
            Some(elsewhere) => local
                .map(|u| {
                    let mut blended = u.scaled(p);
                    blended.add_scaled(&elsewhere, 1.0 - p);
                    blended
                })
                .collect(),
        })
    }
}

/// Records a visit to `state` with accumulated reward `accumulated` and
/// returns the augmented key (the base state) with its utility vectors.
///
/// `visited` holds the per-episode first-visit flags.
pub fn moss_update_statistics(
    tables: &mut MossTables,
    visited: &mut [bool],
    state: usize,
    accumulated: &RewardVector,
    alpha: f64,
) -> Result<(usize, Vec<RewardVector>)> {
    if tables.episodes == 0 {
        return Err(Error::ZeroEpisodes);
    }
    if !visited[state] {
        tables.visits[state] += 1;
        visited[state] = true;
    }
    tables.state_prefix[state].move_towards(accumulated, alpha);
    Ok((state, tables.utilities(state)?))
}

#[derive(Clone, Debug)]
struct Episode {
    params: EpisodeParams,
    state: usize,
    accumulated: RewardVector,
    visited: Vec<bool>,
    traces: Traces<(usize, usize)>,
    pending: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct MossAgent {
    ordering: UtilityOrdering,
    trace: TraceParams,
    tables: MossTables,
    episode: Option<Episode>,
}

impl MossAgent {
    pub fn new(env: &EnvironmentSpec, ordering: UtilityOrdering, trace: TraceParams) -> Self {
        MossAgent {
            ordering,
            trace,
            tables: MossTables::new(env),
            episode: None,
        }
    }

    pub fn tables(&self) -> &MossTables {
        &self.tables
    }

    pub fn tables_mut(&mut self) -> &mut MossTables {
        &mut self.tables
    }

    pub fn traces(&self) -> Vec<((usize, usize), f64)> {
        self.episode
            .as_ref()
            .map(|e| e.traces.iter().collect())
            .unwrap_or_default()
    }
}

impl Agent for MossAgent {
    fn begin_episode(
        &mut self,
        env: &EnvironmentSpec,
        params: EpisodeParams,
        rng: &mut SeededRng,
    ) -> Result<()> {
        self.tables.episodes += 1;
        let mut visited = vec![false; env.state_count()];
        let accumulated = RewardVector::zeros(env.objective_count());
        let start = env.start_state();
        let (_, utilities) = moss_update_statistics(
            &mut self.tables,
            &mut visited,
            start,
            &accumulated,
            params.alpha,
        )?;
        let first = self
            .ordering
            .softmax_t(&utilities, params.temperature, rng)?;
        self.episode = Some(Episode {
            params,
            state: start,
            accumulated,
            visited,
            traces: Traces::new(),
            pending: Some(first),
        });
        Ok(())
    }

    fn select(&mut self, _: &EnvironmentSpec, state: usize, _: &mut SeededRng) -> Result<usize> {
        let episode = self.episode.as_ref().ok_or(Error::UninitializedEpisode)?;
        if episode.state != state {
            return Err(Error::UninitializedEpisode);
        }
        episode.pending.ok_or(Error::UninitializedEpisode)
    }

    fn observe(
        &mut self,
        _: &EnvironmentSpec,
        step: &Step,
        done: bool,
        rng: &mut SeededRng,
    ) -> Result<()> {
        let episode = self.episode.as_mut().ok_or(Error::UninitializedEpisode)?;
        let tables = &mut self.tables;
        let alpha = episode.params.alpha;
        episode.accumulated += &step.reward;

        let current = (step.state, step.action);
        let mut delta = &step.reward - &tables.q[current.0][current.1];
        let mut continue_traces = true;
        match step.next {
            Next::State(next) if !done => {
                let (key, utilities) = moss_update_statistics(
                    tables,
                    &mut episode.visited,
                    next,
                    &episode.accumulated,
                    alpha,
                )?;
                let greedy = self.ordering.argbest_unchecked(&utilities);
                let explore =
                    self.ordering
                        .softmax_t(&utilities, episode.params.temperature, rng)?;
                delta.add_scaled(&tables.q[key][greedy], self.trace.gamma);
                continue_traces = explore == greedy;
                episode.state = next;
                episode.pending = Some(explore);
            }
            _ => episode.pending = None,
        }

        episode.traces.visit(current);
        for ((s, a), e) in episode.traces.iter() {
            tables.q[s][a].add_scaled(&delta, alpha * e);
        }
        if continue_traces {
            episode.traces.decay(self.trace.gamma * self.trace.lambda);
        } else {
            episode.traces.clear();
        }
        Ok(())
    }

    fn end_episode(&mut self, _: &EnvironmentSpec) -> Result<()> {
        let episode = self.episode.take().ok_or(Error::UninitializedEpisode)?;
        let alpha = episode.params.alpha;
        self.tables
            .episode_return
            .move_towards(&episode.accumulated, alpha);
        for (s, &visited) in episode.visited.iter().enumerate() {
            if visited {
                self.tables.state_return[s].move_towards(&episode.accumulated, alpha);
            }
        }
        Ok(())
    }

    fn greedy_policy(&self, env: &EnvironmentSpec) -> GreedyPolicy {
        let actions = (0..env.state_count())
            .map(|s| {
                let utilities = self.tables.utilities(s).unwrap_or_else(|_| {
                    // Before any episode: rank on P(s) + Q(s, a) alone.
                    self.tables.q[s]
                        .iter()
                        .map(|q| &self.tables.state_prefix[s] + q)
                        .collect()
                });
                self.ordering.argbest_unchecked(&utilities)
            })
            .collect();
        GreedyPolicy::new(env, actions)
    }
}
