//! Reward shaping as a fix for the baseline agent, and where it stops
//! working.
//!
//! `mr` charges -1 on the success objective for every transition into the
//! failure state, which surfaces each action's failure risk in the
//! accumulated expected reward. `3st` keeps the same rewards but delays
//! Direct's failure by one step through an extra state C, so the penalty
//! arrives too late to shape the choice at B.

use morl::harness::{format_summary, run_trials, AgentKind, ExperimentConfig, ScheduleSpec};

fn main() -> morl::Result<()> {
    for env in ["mr", "3st"] {
        let config = ExperimentConfig {
            agent: AgentKind::Baseline,
            environment: env.to_string(),
            alpha: ScheduleSpec::linear(0.01, 0.0),
            ..Default::default()
        };
        let (summary, _) = run_trials(&config)?;
        print!("{}", format_summary(&summary));
        let di = summary.count_where(|p| p.starts_with("DI"));
        println!("trials starting with DI: {di}/{}\n", summary.trials());
    }
    Ok(())
}
