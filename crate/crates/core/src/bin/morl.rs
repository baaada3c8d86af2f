use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use morl::environments;
use morl::harness::{
    format_summary, run_experiment, summarize, write_oracle_table, AgentKind, ExperimentConfig,
    ScheduleSpec,
};
use morl::utility::UtilityOrdering;

#[derive(Parser)]
#[command(
    name = "morl",
    version,
    about = "Multi-objective Q-learning experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every deterministic policy's exact mean return as CSV.
    Oracle {
        /// Built-in variant (original, mr, 3st, id) or path to a JSON spec.
        #[arg(long)]
        env: String,
        /// Threshold on the first objective [default: the variant's own].
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Run a seeded multi-trial experiment and write its artifacts.
    Run {
        /// JSON experiment config; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        agent: Option<AgentKind>,
        #[arg(long)]
        env: Option<String>,
        /// e.g. constant:0.01 or linear:0.01:0
        #[arg(long)]
        alpha_schedule: Option<ScheduleSpec>,
        /// e.g. linear:10:2
        #[arg(long)]
        temp_schedule: Option<ScheduleSpec>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the final-policy histogram of a finished experiment.
    Summarize {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Oracle { env, threshold } => {
            let spec = environments::resolve(&env)?;
            let t = threshold.unwrap_or_else(|| environments::default_threshold(&env));
            let ordering = UtilityOrdering::new(vec![t; spec.objective_count() - 1]);
            write_oracle_table(&spec, &ordering, io::stdout().lock())?;
        }
        Command::Run {
            config,
            agent,
            env,
            alpha_schedule,
            temp_schedule,
            trials,
            episodes,
            seed,
            out,
        } => {
            let mut c = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(v) = agent {
                c.agent = v;
            }
            if let Some(v) = env {
                c.environment = v;
            }
            if let Some(v) = alpha_schedule {
                c.alpha = v;
            }
            if let Some(v) = temp_schedule {
                c.temperature = v;
            }
            if let Some(v) = trials {
                c.trials = v;
            }
            if let Some(v) = episodes {
                c.episodes_per_trial = v;
            }
            if let Some(v) = seed {
                c.base_seed = v;
            }
            if let Some(v) = out {
                c.output_dir = v;
            }
            let summary = run_experiment(&c)?;
            print!("{}", format_summary(&summary));
            println!("artifacts written to {}", c.output_dir.display());
        }
        Command::Summarize { dir } => print!("{}", format_summary(&summarize(dir)?)),
    }
    Ok(())
}
