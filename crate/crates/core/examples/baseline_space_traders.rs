//! The baseline agent (accumulated expected reward as augmented state) on
//! the original Space Traders problem, with a constant and a decaying
//! learning rate.
//!
//! ```text
//! cargo run --release --example baseline_space_traders
//! ```

use morl::agents::{AugmentedStateKey, BaselineAgent, TraceParams};
use morl::environments::build_original;
use morl::harness::{format_summary, run_trials, train_agent, ExperimentConfig, ScheduleSpec};
use morl::rng::SeededRng;
use morl::utility::{Schedule, UtilityOrdering};

fn main() -> morl::Result<()> {
    for alpha in [
        ScheduleSpec::constant(0.01),
        ScheduleSpec::linear(0.01, 0.0),
    ] {
        let config = ExperimentConfig {
            alpha,
            ..Default::default()
        };
        let (summary, _) = run_trials(&config)?;
        println!("{}", format_summary(&summary));
    }

    // Look inside one trained agent. Whatever happens at A, reaching B
    // leaves nothing on the success objective of the accumulated expected
    // reward, so B's choice cannot depend on how likely A was to fail.
    let env = build_original();
    let episodes = 20_000;
    let mut agent = BaselineAgent::new(&env, UtilityOrdering::single(0.88), TraceParams::default());
    let log = train_agent(
        &env,
        &mut agent,
        &Schedule::linear(0.01, 0.0, episodes),
        &Schedule::linear(10.0, 2.0, episodes),
        &mut SeededRng::new(3),
    )?;
    println!("final greedy policy: {}", log.greedy.last().unwrap());
    let tables = agent.tables();
    for key in tables.keys() {
        let AugmentedStateKey {
            base_state,
            trajectory,
        } = key;
        let path: String = trajectory
            .iter()
            .map(|&(s, a)| format!("{}{} ", env.states()[s], env.actions(s)[a].initial))
            .collect();
        println!("Q({} | {}):", env.states()[*base_state], path.trim());
        for (a, q) in tables.q_values(key).unwrap().iter().enumerate() {
            println!("    {:<9} {q}", env.actions(*base_state)[a].name);
        }
    }
    Ok(())
}
