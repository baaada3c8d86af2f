//! MOSS: Q-values mixed with global return statistics.
//!
//! On the original problem this finds DI. On the `id` variant, where the
//! time penalties of A and B are swapped so that ID becomes optimal, it
//! still settles on DI.

use morl::agents::{MossAgent, TraceParams};
use morl::environments::{build, default_threshold};
use morl::harness::train_agent;
use morl::rng::SeededRng;
use morl::utility::{Schedule, UtilityOrdering};

fn main() -> morl::Result<()> {
    let episodes = 20_000;
    for name in ["original", "id"] {
        let env = build(name)?;
        let mut agent = MossAgent::new(
            &env,
            UtilityOrdering::single(default_threshold(name)),
            TraceParams::default(),
        );
        let mut finals = Vec::new();
        for seed in 0..5 {
            let mut trained = agent.clone();
            let log = train_agent(
                &env,
                &mut trained,
                &Schedule::linear(0.01, 0.0, episodes),
                &Schedule::linear(10.0, 2.0, episodes),
                &mut SeededRng::new(seed),
            )?;
            finals.push(log.greedy.last().cloned().unwrap_or_default());
            if seed == 4 {
                agent = trained;
            }
        }
        println!("== {name}: final policies for seeds 0..5: {finals:?}");

        let t = agent.tables();
        println!(
            "  E(pi) = {}  after {} episodes",
            t.episode_return, t.episodes
        );
        for s in 0..env.state_count() {
            let p = t.visit_probability(s)?;
            print!(
                "  {}: p = {p:.4}  E(s) = {}",
                env.states()[s],
                t.state_return[s]
            );
            match t.return_without(s)? {
                Some(e) => println!("  E(not s) = {e}"),
                None => println!(),
            }
            for (a, u) in t.utilities(s)?.iter().enumerate() {
                println!("      U({}) = {u}", env.actions(s)[a].name);
            }
        }
    }
    Ok(())
}
