//! `foresight`: simulate, train, calibrate, detect and evaluate from one
//! JSON configuration file.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, PipelineConfig};

#[derive(Parser)]
#[command(name = "foresight", version, about = "Misbehaviour prediction from reconstruction errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Pipeline configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Global seed: offsets scenario seeds and seeds training.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Acceptable nominal false-alarm probability.
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Replace the smoothing filter by a k-frame moving average.
    #[arg(long = "ar-k", global = true)]
    ar_k: Option<usize>,

    /// Reaction period(s); the first drives labelling, all feed the sweep table.
    #[arg(long = "reaction-r", global = true, value_delimiter = ',')]
    reaction_r: Option<Vec<usize>>,

    /// Explicit sweep thresholds.
    #[arg(long, global = true, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate frame streams, misbehaviour logs and intensity traces.
    Simulate,
    /// Train the reconstructor on nominal streams.
    Train,
    /// Fit the gamma model to nominal errors and derive the threshold.
    Fit,
    /// Compute error series and alarm logs.
    Detect,
    /// Write window labels for the evaluation streams.
    Label,
    /// Score alarms and sweep thresholds.
    Eval,
    /// simulate, train, fit, detect and eval in sequence.
    Pipeline,
}

fn run(cli: &Cli) -> error::CliResult<()> {
    let path = cli.config.as_ref().ok_or_else(|| error::CliError::Usage("--config <path> is required".into()))?;
    let overrides = Overrides {
        seed: cli.seed,
        epsilon: cli.epsilon,
        ar_k: cli.ar_k,
        reaction_r: cli.reaction_r.clone(),
        thresholds: cli.thresholds.clone(),
    };
    let cfg = PipelineConfig::load(path, &overrides)?;
    match cli.command {
        Command::Simulate => commands::simulate(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Fit => commands::fit(&cfg),
        Command::Detect => commands::detect(&cfg),
        Command::Label => commands::label(&cfg),
        Command::Eval => commands::eval(&cfg),
        Command::Pipeline => commands::pipeline(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
