//! Policy options on the original Space Traders problem.
//!
//! Each of the nine deterministic policies becomes a single option chosen
//! at planet A. The learned start-state values are printed next to the
//! oracle's exact means for one seed, followed by the final policies of
//! twenty seeds.

use morl::agents::{Agent, PolicyOptionsAgent, TraceParams};
use morl::environments::build_original;
use morl::harness::{run_trials, train_agent, AgentKind, ExperimentConfig, ScheduleSpec};
use morl::oracle::exact_expected_return;
use morl::rng::SeededRng;
use morl::utility::{Schedule, UtilityOrdering};

fn main() -> morl::Result<()> {
    let env = build_original();
    let episodes = 20_000;
    let mut agent =
        PolicyOptionsAgent::new(&env, UtilityOrdering::single(0.88), TraceParams::default());
    train_agent(
        &env,
        &mut agent,
        &Schedule::linear(0.01, 0.0, episodes),
        &Schedule::linear(10.0, 2.0, episodes),
        &mut SeededRng::new(0),
    )?;

    println!("option  learned Q(A, option)                      oracle mean");
    let mut worst = 0.0f64;
    for (option, q) in agent.start_values() {
        let exact = exact_expected_return(&env, &option).mean_return;
        worst = worst.max(q.max_abs_diff(&exact));
        println!("{:<7} {:<42} {}", option.identifier, q.to_string(), exact);
    }
    println!("largest componentwise gap: {worst:.4}");
    println!("greedy option: {}\n", agent.greedy_policy(&env));

    let config = ExperimentConfig {
        agent: AgentKind::Options,
        alpha: ScheduleSpec::linear(0.01, 0.0),
        ..Default::default()
    };
    let (summary, _) = run_trials(&config)?;
    println!(
        "final policies over {} seeds: {:?}",
        summary.trials(),
        summary.final_policies
    );
    println!(
        "matches the SER optimum in {}/{}",
        summary.success_count,
        summary.trials()
    );
    Ok(())
}
