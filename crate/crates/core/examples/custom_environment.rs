//! Defining a new MOMDP in JSON, validating it, evaluating it exactly and
//! training an agent on it.

use morl::agents::{BaselineAgent, TraceParams};
use morl::environments::parse_spec;
use morl::harness::train_agent;
use morl::oracle::{evaluate_all, ser_optimal};
use morl::rng::SeededRng;
use morl::utility::{Schedule, UtilityOrdering};
use morl::Error;

const BRIDGE: &str = r#"{
  "name": "bridge",
  "states": ["bank", "bridge"],
  "start_state": "bank",
  "horizon": 2,
  "objectives": ["arrive", "time"],
  "dynamics": [
    {"state": "bank", "action": "walk", "initial": "W", "outcomes": [
      {"p": 1.0, "next": "bridge", "reward": [0, -3]}]},
    {"state": "bank", "action": "run", "initial": "R", "outcomes": [
      {"p": 0.8, "next": "bridge", "reward": [0, -1]},
      {"p": 0.2, "next": "$failure", "reward": [0, -1]}]},
    {"state": "bridge", "action": "walk", "initial": "W", "outcomes": [
      {"p": 1.0, "next": "$success", "reward": [1, -3]}]},
    {"state": "bridge", "action": "run", "initial": "R", "outcomes": [
      {"p": 0.9, "next": "$success", "reward": [1, -1]},
      {"p": 0.1, "next": "$failure", "reward": [0, -1]}]}
  ]
}"#;

fn main() -> morl::Result<()> {
    // Validation reports every problem at once.
    let broken = BRIDGE.replace("\"p\": 0.8", "\"p\": 0.7").replace(
        "\"bridge\", \"reward\": [0, -3]",
        "\"river\", \"reward\": [0, -3]",
    );
    if let Err(Error::Validation(errors)) = parse_spec(&broken) {
        println!("rejected:");
        for v in errors.violations() {
            println!("  - {v}");
        }
    }

    let env = parse_spec(BRIDGE)?;
    let ordering = UtilityOrdering::single(0.75);
    for e in evaluate_all(&env) {
        println!("{:<3} {}", e.policy.identifier, e.mean_return);
    }
    let (best, mean) = ser_optimal(&env, &ordering);
    println!("SER-optimal at 0.75: {best} {mean}");

    let episodes = 5_000;
    let mut agent = BaselineAgent::new(&env, ordering, TraceParams::default());
    let log = train_agent(
        &env,
        &mut agent,
        &Schedule::linear(0.05, 0.0, episodes),
        &Schedule::linear(10.0, 1.0, episodes),
        &mut SeededRng::new(1),
    )?;
    println!(
        "baseline agent after {episodes} episodes: {}",
        log.greedy.last().unwrap()
    );
    Ok(())
}
