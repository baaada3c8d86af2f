//! Exact evaluation of deterministic policies by full outcome-tree expansion.

use crate::agents::{EpisodeParams, FixedPolicyAgent, GreedyPolicy};
use crate::momdp::{run_episode, EnvironmentSpec, Next};
use crate::reward::RewardVector;
use crate::rng::SeededRng;
use crate::utility::UtilityOrdering;

/// One complete path through the outcome tree.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub probability: f64,
    pub total_return: RewardVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyEvaluation {
    pub policy: GreedyPolicy,
    pub mean_return: RewardVector,
    pub trajectories: Vec<Trajectory>,
}

/// All deterministic policies, first state most significant, actions in
/// index order.
pub fn enumerate_policies(env: &EnvironmentSpec) -> Vec<GreedyPolicy> {
    let counts: Vec<usize> = (0..env.state_count())
        .map(|s| env.action_count(s))
        .collect();
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut actions = vec![0; counts.len()];
    for _ in 0..total {
        out.push(GreedyPolicy::new(env, actions.clone()));
        for s in (0..counts.len()).rev() {
            actions[s] += 1;
            if actions[s] < counts[s] {
                break;
            }
            actions[s] = 0;
        }
    }
    out
}

pub fn exact_expected_return(env: &EnvironmentSpec, policy: &GreedyPolicy) -> PolicyEvaluation {
    let mut trajectories = Vec::new();
    expand(
        env,
        &policy.actions,
        env.start_state(),
        0,
        1.0,
        RewardVector::zeros(env.objective_count()),
        &mut trajectories,
    );
    let mut mean_return = RewardVector::zeros(env.objective_count());
    for t in &trajectories {
        mean_return.add_scaled(&t.total_return, t.probability);
    }
    PolicyEvaluation {
        policy: policy.clone(),
        mean_return,
        trajectories,
    }
}

fn expand(
    env: &EnvironmentSpec,
    actions: &[usize],
    state: usize,
    depth: usize,
    probability: f64,
    so_far: RewardVector,
    out: &mut Vec<Trajectory>,
) {
    let outcomes = env
        .outcomes(state, actions[state])
        .expect("policy assigns a valid action to every state");
    for o in outcomes.iter().filter(|o| o.probability > 0.0) {
        let p = probability * o.probability;
        let total = &so_far + &o.reward;
        match o.next {
            Next::State(next) if depth + 1 < env.horizon() => {
                expand(env, actions, next, depth + 1, p, total, out)
            }
            _ => out.push(Trajectory {
                probability: p,
                total_return: total,
            }),
        }
    }
}

/// Every policy with its exact mean return, in enumeration order.
pub fn evaluate_all(env: &EnvironmentSpec) -> Vec<PolicyEvaluation> {
    enumerate_policies(env)
        .iter()
        .map(|p| exact_expected_return(env, p))
        .collect()
}

/// The SER-optimal deterministic policy under `ordering`; ties go to the
/// policy enumerated first.
pub fn ser_optimal(
    env: &EnvironmentSpec,
    ordering: &UtilityOrdering,
) -> (GreedyPolicy, RewardVector) {
    let evaluations = evaluate_all(env);
    let means: Vec<RewardVector> = evaluations.iter().map(|e| e.mean_return.clone()).collect();
    let best = ordering.argbest_unchecked(&means);
    let e = evaluations
        .into_iter()
        .nth(best)
        .expect("at least one policy");
    (e.policy, e.mean_return)
}

/// Expected scalarised return: the mean of `scalarise(return)` over the
/// policy's trajectories.
pub fn esr_value(
    env: &EnvironmentSpec,
    policy: &GreedyPolicy,
    scalarise: impl Fn(&RewardVector) -> f64,
) -> f64 {
    exact_expected_return(env, policy)
        .trajectories
        .iter()
        .map(|t| t.probability * scalarise(&t.total_return))
        .sum()
}

/// Sample mean and per-objective standard error of the return over
/// `episodes` simulated episodes.
pub fn monte_carlo_return(
    env: &EnvironmentSpec,
    policy: &GreedyPolicy,
    episodes: usize,
    seed: u64,
) -> (RewardVector, RewardVector) {
    let mut agent = FixedPolicyAgent::new(policy.actions.clone());
    let mut rng = SeededRng::new(seed);
    let params = EpisodeParams {
        alpha: 0.0,
        temperature: 1.0,
    };
    let n = env.objective_count();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for _ in 0..episodes {
        let t = run_episode(env, &mut agent, params, &mut rng).expect("fixed policies do not fail");
        for (i, v) in t.total_return.iter().enumerate() {
            sum[i] += v;
            sum_sq[i] += v * v;
        }
    }
    let count = episodes as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / count).collect();
    let stderr: Vec<f64> = (0..n)
        .map(|i| ((sum_sq[i] / count - mean[i] * mean[i]).max(0.0) / count).sqrt())
        .collect();
    (mean.into(), stderr.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{build_3st, build_id, build_mr, build_original};
    use crate::momdp::{validate_spec, DynamicsEntry, OutcomeEntry, SpecDocument};

    fn policy(env: &EnvironmentSpec, id: &str) -> GreedyPolicy {
        GreedyPolicy::new(env, env.parse_policy(id).unwrap())
    }

    fn assert_mean(env: &EnvironmentSpec, id: &str, expected: [f64; 2]) {
        let e = exact_expected_return(env, &policy(env, id));
        assert!(
            e.mean_return.max_abs_diff(&expected.into()) < 1e-9,
            "{id}: {} vs {expected:?}",
            e.mean_return
        );
        let p: f64 = e.trajectories.iter().map(|t| t.probability).sum();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn policy_counts() {
        assert_eq!(enumerate_policies(&build_original()).len(), 9);
        assert_eq!(enumerate_policies(&build_3st()).len(), 27);
        let single = validate_spec(&SpecDocument {
            name: "single".into(),
            states: vec!["S".into()],
            start_state: "S".into(),
            horizon: 1,
            objectives: vec!["o".into(), "t".into()],
            dynamics: vec![DynamicsEntry {
                state: "S".into(),
                action: "go".into(),
                initial: "G".into(),
                outcomes: vec![OutcomeEntry {
                    p: 1.0,
                    next: "$success".into(),
                    reward: RewardVector::from([1.0, 0.0]),
                }],
            }],
        })
        .unwrap();
        let policies = enumerate_policies(&single);
        assert_eq!(policies.len(), 1);
        assert_eq!(policies[0].identifier, "G");
    }

    #[test]
    fn original_means() {
        let env = build_original();
        assert_mean(&env, "DI", [0.9, -14.5]);
        assert_mean(&env, "TT", [0.7225, 0.0]);
    }

    #[test]
    fn id_means() {
        assert_mean(&build_id(), "DI", [0.9, -18.7]);
        assert_mean(&build_id(), "ID", [0.9, -15.5]);
    }

    #[test]
    fn ser_optima() {
        let (p, v) = ser_optimal(&build_original(), &UtilityOrdering::single(0.88));
        assert_eq!(p.identifier, "DI");
        assert!(v.max_abs_diff(&RewardVector::from([0.9, -14.5])) < 1e-9);
        let (p, v) = ser_optimal(&build_id(), &UtilityOrdering::single(0.88));
        assert_eq!(p.identifier, "ID");
        assert!(v.max_abs_diff(&RewardVector::from([0.9, -15.5])) < 1e-9);
        let (p, _) = ser_optimal(&build_mr(), &UtilityOrdering::single(0.76));
        assert_eq!(p.identifier, "DI");
    }

    #[test]
    fn three_state_optimum_starts_with_di() {
        let env = build_3st();
        let (p, v) = ser_optimal(&env, &UtilityOrdering::single(0.76));
        assert!(p.identifier.starts_with("DI"), "{}", p.identifier);
        assert!(v.max_abs_diff(&RewardVector::from([0.8, -14.5])) < 1e-9);
    }

    #[test]
    fn esr_values() {
        let env = build_original();
        let f = |v: &RewardVector| v[0] * v[0] + 0.01 * v[1];
        let ii = esr_value(&env, &policy(&env, "II"), f);
        assert!((ii - f(&RewardVector::from([1.0, -22.0]))).abs() < 1e-12);
        let first = |v: &RewardVector| v[0];
        assert!((esr_value(&env, &policy(&env, "DI"), first) - 0.9).abs() < 1e-12);
        assert!((esr_value(&env, &policy(&env, "DD"), first) - 0.81).abs() < 1e-12);
    }

    #[test]
    fn linear_esr_equals_ser() {
        let env = build_original();
        for p in enumerate_policies(&env) {
            let mean = exact_expected_return(&env, &p).mean_return;
            let f = |v: &RewardVector| 0.3 * v[0] - 1.7 * v[1];
            assert!((esr_value(&env, &p, f) - f(&mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn ser_optimum_ignores_enumeration_order() {
        let env = build_original();
        let ordering = UtilityOrdering::single(0.88);
        let mut evals = evaluate_all(&env);
        evals.reverse();
        let means: Vec<RewardVector> = evals.iter().map(|e| e.mean_return.clone()).collect();
        let best = ordering.tlo_argbest(&means).unwrap();
        assert_eq!(evals[best].policy.identifier, "DI");
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let env = build_original();
        let p = policy(&env, "DD");
        let (mean, se) = monte_carlo_return(&env, &p, 50_000, 17);
        let exact = exact_expected_return(&env, &p).mean_return;
        for i in 0..2 {
            assert!((mean[i] - exact[i]).abs() <= 3.0 * se[i] + 1e-12);
        }
    }
}
