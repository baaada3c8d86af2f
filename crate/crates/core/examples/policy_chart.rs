//! Runs a small experiment and writes its artifacts, then prints how often
//! one trial's greedy policy changed and how long it spent below the
//! threshold.
//!
//! ```text
//! cargo run --release --example policy_chart -- [OUTPUT_DIR]
//! ```

use std::path::PathBuf;

use morl::harness::{run_experiment, summarize, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("morl-policy-chart"));
    let config = ExperimentConfig {
        trials: 4,
        output_dir: out.clone(),
        ..Default::default()
    };
    run_experiment(&config)?;
    let summary = summarize(&out)?;
    println!("final policies: {:?}", summary.final_policies);

    let mut reader = csv::Reader::from_path(out.join("trial_0_chart.csv"))?;
    let (mut switches, mut below, mut rows) = (0, 0, 0);
    let mut previous = String::new();
    for record in reader.records() {
        let record = record?;
        if record[1] != previous {
            switches += 1;
            previous = record[1].to_string();
        }
        below += usize::from(&record[2] == "false");
        rows += 1;
    }
    println!(
        "trial 0: {rows} episodes, greedy policy changed {} times, {below} episodes below threshold",
        switches - 1
    );
    println!("artifacts in {}", out.display());
    Ok(())
}
