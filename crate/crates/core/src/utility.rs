//! Thresholded lexicographic ordering, softmax-t exploration and
//! per-episode hyperparameter schedules.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::RewardVector;
use crate::rng::SeededRng;

/// Thresholded lexicographic ordering over reward vectors.
///
/// Objectives `1..n-1` are clamped at their thresholds and the vectors are
/// compared lexicographically on the clamped values, with the last objective
/// left unclamped. The result is a total preorder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityOrdering {
    thresholds: Vec<f64>,
}

/// Comparable image of a reward vector under a [`UtilityOrdering`].
#[derive(Clone, Debug, PartialEq)]
pub struct TloKey(Vec<f64>);

impl TloKey {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl PartialOrd for TloKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(lexicographic(&self.0, &other.0))
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return Ordering::Less;
        }
        if x > y {
            return Ordering::Greater;
        }
    }
    Ordering::Equal
}

impl UtilityOrdering {
    pub fn new(thresholds: Vec<f64>) -> Self {
        UtilityOrdering { thresholds }
    }

    /// Two objectives, thresholding the first.
    pub fn single(threshold: f64) -> Self {
        UtilityOrdering::new(vec![threshold])
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn objective_count(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn tlo_key(&self, v: &RewardVector) -> Result<TloKey> {
        self.check(v)?;
        let n = self.thresholds.len();
        let mut key: Vec<f64> = v
            .values()
            .iter()
            .zip(&self.thresholds)
            .map(|(x, t)| x.min(*t))
            .collect();
        key.push(v[n]);
        Ok(TloKey(key))
    }

    /// Compares two vectors without materialising keys. Lengths must match
    /// the ordering.
    pub fn compare(&self, a: &RewardVector, b: &RewardVector) -> Ordering {
        debug_assert_eq!(a.len(), self.objective_count());
        debug_assert_eq!(b.len(), self.objective_count());
        let n = self.thresholds.len();
        for (i, t) in self.thresholds.iter().enumerate() {
            let (x, y) = (a[i].min(*t), b[i].min(*t));
            if x < y {
                return Ordering::Less;
            }
            if x > y {
                return Ordering::Greater;
            }
        }
        a[n].partial_cmp(&b[n]).unwrap_or(Ordering::Equal)
    }

    /// True when every thresholded objective reaches its threshold.
    pub fn meets_thresholds(&self, v: &RewardVector) -> bool {
        self.thresholds.iter().enumerate().all(|(i, t)| v[i] >= *t)
    }

    fn check(&self, v: &RewardVector) -> Result<()> {
        if v.len() != self.objective_count() {
            return Err(Error::DimensionMismatch {
                expected: self.objective_count(),
                found: v.len(),
            });
        }
        Ok(())
    }

    fn check_all(&self, candidates: &[RewardVector]) -> Result<()> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        candidates.iter().try_for_each(|c| self.check(c))
    }

    /// Index of the best candidate; ties go to the lowest index.
    pub fn tlo_argbest(&self, candidates: &[RewardVector]) -> Result<usize> {
        self.check_all(candidates)?;
        Ok(self.argbest_unchecked(candidates))
    }

    pub(crate) fn argbest_unchecked(&self, candidates: &[RewardVector]) -> usize {
        let mut best = 0;
        for i in 1..candidates.len() {
            if self.compare(&candidates[i], &candidates[best]) == Ordering::Greater {
                best = i;
            }
        }
        best
    }

    /// Softmax-t selection probabilities.
    ///
    /// Each candidate scores the number of other candidates it strictly beats
    /// under the ordering; probabilities are Boltzmann in `score / temperature`.
    pub fn softmax_probabilities(
        &self,
        candidates: &[RewardVector],
        temperature: f64,
    ) -> Result<Vec<f64>> {
        self.check_all(candidates)?;
        if temperature.is_nan() || temperature <= 0.0 {
            return Err(Error::NonPositiveTemperature(temperature));
        }
        Ok(self.probabilities_unchecked(candidates, temperature))
    }

    fn probabilities_unchecked(&self, candidates: &[RewardVector], temperature: f64) -> Vec<f64> {
        let scores = tournament_scores(self, candidates);
        let top = scores.iter().copied().max().unwrap_or(0);
        let mut weights: Vec<f64> = scores
            .iter()
            .map(|&s| ((s as f64 - top as f64) / temperature).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        weights
    }

    /// Samples an index from the softmax-t distribution.
    pub fn softmax_t(
        &self,
        candidates: &[RewardVector],
        temperature: f64,
        rng: &mut SeededRng,
    ) -> Result<usize> {
        let probs = self.softmax_probabilities(candidates, temperature)?;
        let u = rng.uniform();
        let mut cumulative = 0.0;
        for (i, p) in probs.iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                return Ok(i);
            }
        }
        Ok(probs.len() - 1)
    }
}

fn tournament_scores(ordering: &UtilityOrdering, candidates: &[RewardVector]) -> Vec<usize> {
    let n = candidates.len();
    let mut scores = vec![0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            match ordering.compare(&candidates[i], &candidates[j]) {
                Ordering::Greater => scores[i] += 1,
                Ordering::Less => scores[j] += 1,
                Ordering::Equal => {}
            }
        }
    }
    scores
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    LinearDecay,
}

/// A per-episode hyperparameter schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub initial: f64,
    pub final_value: f64,
    pub total_episodes: usize,
}

impl Schedule {
    pub fn constant(value: f64, total_episodes: usize) -> Self {
        Schedule {
            kind: ScheduleKind::Constant,
            initial: value,
            final_value: value,
            total_episodes,
        }
    }

    pub fn linear(initial: f64, final_value: f64, total_episodes: usize) -> Self {
        Schedule {
            kind: ScheduleKind::LinearDecay,
            initial,
            final_value,
            total_episodes,
        }
    }

    /// Value at `episode` (0-based). A one-episode linear schedule yields
    /// `initial`.
    pub fn value(&self, episode: usize) -> Result<f64> {
        if episode >= self.total_episodes {
            return Err(Error::EpisodeOutOfRange {
                episode,
                total: self.total_episodes,
            });
        }
        Ok(match self.kind {
            ScheduleKind::Constant => self.initial,
            ScheduleKind::LinearDecay if self.total_episodes == 1 => self.initial,
            ScheduleKind::LinearDecay => {
                let last = self.total_episodes - 1;
                if episode == last {
                    return Ok(self.final_value);
                }
                let frac = episode as f64 / last as f64;
                let v = self.initial + (self.final_value - self.initial) * frac;
                v.clamp(
                    self.initial.min(self.final_value),
                    self.initial.max(self.final_value),
                )
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(a: f64, b: f64) -> RewardVector {
        RewardVector::from([a, b])
    }

    #[test]
    fn di_beats_id_at_088() {
        let o = UtilityOrdering::single(0.88);
        let di = o.tlo_key(&rv(0.9, -14.5)).unwrap();
        let id = o.tlo_key(&rv(0.9, -19.9)).unwrap();
        assert!(di > id);
        assert_eq!(di.values(), &[0.88, -14.5]);
    }

    #[test]
    fn below_threshold_loses_regardless_of_time() {
        let o = UtilityOrdering::single(0.88);
        assert_eq!(o.compare(&rv(0.85, -12.0), &rv(1.0, -22.0)), Ordering::Less);
    }

    #[test]
    fn reflexive() {
        let o = UtilityOrdering::single(0.88);
        let v = rv(0.3, -4.0);
        assert_eq!(o.tlo_key(&v).unwrap(), o.tlo_key(&v).unwrap());
        assert_eq!(o.compare(&v, &v), Ordering::Equal);
    }

    #[test]
    fn dimension_mismatch() {
        let o = UtilityOrdering::single(0.88);
        let err = o.tlo_key(&RewardVector::from([1.0, 2.0, 3.0])).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn argbest_on_state_b_means() {
        let o = UtilityOrdering::single(0.88);
        let original = [rv(1.0, -10.0), rv(0.9, -7.9), rv(0.85, 0.0)];
        assert_eq!(o.tlo_argbest(&original).unwrap(), 1);
        let id_variant = [rv(1.0, -12.0), rv(0.9, -5.5), rv(0.85, 0.0)];
        assert_eq!(o.tlo_argbest(&id_variant).unwrap(), 1);
        let equal = [rv(0.5, -1.0), rv(0.5, -1.0), rv(0.5, -1.0)];
        assert_eq!(o.tlo_argbest(&equal).unwrap(), 0);
        assert!(matches!(o.tlo_argbest(&[]), Err(Error::EmptyCandidates)));
    }

    #[test]
    fn two_candidate_softmax() {
        let o = UtilityOrdering::single(0.88);
        let p = o
            .softmax_probabilities(&[rv(1.0, 0.0), rv(0.0, 0.0)], 2.0)
            .unwrap();
        let expected = 0.5f64.exp() / (0.5f64.exp() + 1.0);
        assert!((p[0] - expected).abs() < 1e-15);
        assert!((p[0] - 0.6225).abs() < 1e-4);
    }

    #[test]
    fn equal_candidates_are_uniform() {
        let o = UtilityOrdering::single(0.88);
        let p = o
            .softmax_probabilities(&vec![rv(0.1, 0.1); 4], 3.0)
            .unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn huge_temperature_is_near_uniform() {
        let o = UtilityOrdering::single(0.88);
        let c = [rv(1.0, -10.0), rv(0.9, -7.9), rv(0.85, 0.0)];
        let p = o.softmax_probabilities(&c, 1e9).unwrap();
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-6));
    }

    #[test]
    fn non_positive_temperature() {
        let o = UtilityOrdering::single(0.88);
        let c = [rv(1.0, 0.0)];
        assert!(matches!(
            o.softmax_probabilities(&c, 0.0),
            Err(Error::NonPositiveTemperature(_))
        ));
        assert!(matches!(
            o.softmax_probabilities(&c, f64::NAN),
            Err(Error::NonPositiveTemperature(_))
        ));
    }

    #[test]
    fn cold_softmax_picks_the_argbest() {
        let o = UtilityOrdering::single(0.88);
        let c = [rv(1.0, -10.0), rv(0.9, -7.9), rv(0.85, 0.0), rv(0.2, 3.0)];
        let best = o.tlo_argbest(&c).unwrap();
        let mut rng = SeededRng::new(5);
        let mut counts = [0usize; 4];
        for _ in 0..100_000 {
            counts[o.softmax_t(&c, 1e-3, &mut rng).unwrap()] += 1;
        }
        let mode = (0..4).max_by_key(|&i| counts[i]).unwrap();
        assert_eq!(mode, best);
    }

    #[test]
    fn learning_rate_decays_to_zero() {
        let s = Schedule::linear(0.01, 0.0, 20_000);
        assert_eq!(s.value(0).unwrap(), 0.01);
        assert_eq!(s.value(19_999).unwrap(), 0.0);
        assert!(matches!(
            s.value(20_000),
            Err(Error::EpisodeOutOfRange {
                episode: 20_000,
                ..
            })
        ));
        let c = Schedule::constant(0.01, 20_000);
        assert_eq!(c.value(0).unwrap(), 0.01);
        assert_eq!(c.value(12_345).unwrap(), 0.01);
    }

    #[test]
    fn temperature_schedule_endpoints() {
        let s = Schedule::linear(10.0, 2.0, 20_000);
        assert_eq!(s.value(0).unwrap(), 10.0);
        assert_eq!(s.value(19_999).unwrap(), 2.0);
        let mid = s.value(10_000).unwrap();
        assert!(mid > 2.0 && mid < 10.0);
        assert_eq!(Schedule::linear(3.0, 1.0, 1).value(0).unwrap(), 3.0);
    }

    fn vec2() -> impl Strategy<Value = RewardVector> {
        (-2.0f64..2.0, -30.0f64..5.0).prop_map(|(a, b)| rv(a, b))
    }

    proptest! {
        #[test]
        fn key_is_monotone(v in vec2(), d0 in 0.0f64..1.0, d1 in 0.0f64..5.0, t in -1.0f64..1.5) {
            let o = UtilityOrdering::single(t);
            let up = rv(v[0] + d0, v[1] + d1);
            prop_assert!(o.tlo_key(&up).unwrap() >= o.tlo_key(&v).unwrap());
        }

        #[test]
        fn ordering_is_total_and_transitive(a in vec2(), b in vec2(), c in vec2(), t in -1.0f64..1.5) {
            let o = UtilityOrdering::single(t);
            prop_assert_eq!(o.compare(&a, &b), o.compare(&b, &a).reverse());
            if o.compare(&a, &b) != Ordering::Less && o.compare(&b, &c) != Ordering::Less {
                prop_assert!(o.compare(&a, &c) != Ordering::Less);
            }
        }

        #[test]
        fn argbest_ignores_dominated_tail(
            head in prop::collection::vec(vec2(), 1..5),
            t in -1.0f64..1.5,
            gaps in prop::collection::vec((0.01f64..1.0, 0.01f64..5.0), 0..4),
        ) {
            let o = UtilityOrdering::single(t);
            let best = o.tlo_argbest(&head).unwrap();
            let mut extended = head.clone();
            let top = head[best].clone();
            for (g0, g1) in gaps {
                extended.push(rv(top[0] - g0, top[1] - g1));
            }
            prop_assert_eq!(o.tlo_argbest(&extended).unwrap(), best);
        }

        #[test]
        fn softmax_is_a_distribution(c in prop::collection::vec(vec2(), 1..9), temp in 0.01f64..50.0) {
            let o = UtilityOrdering::single(0.5);
            let p = o.softmax_probabilities(&c, temp).unwrap();
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&x| x > 0.0));
        }
    }
}
