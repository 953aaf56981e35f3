use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use loopsim_cli::{cmd_compare, cmd_resume, cmd_run};

#[derive(Parser)]
#[command(
    name = "loopsim",
    about = "Batch simulator for recommender feedback loops",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a config file.
    Run {
        /// Path to the TOML run configuration.
        config: PathBuf,
        /// Output directory for the trajectory, logs and manifest.
        #[arg(long)]
        out: PathBuf,
        /// Write a checkpoint every k iterations (0 disables).
        #[arg(long, default_value_t = 0)]
        checkpoint_every: u32,
    },
    /// Continue an interrupted run from its manifest.
    Resume {
        /// Path to the run's manifest.json.
        manifest: PathBuf,
    },
    /// Merge trajectory CSVs into one long-format file.
    Compare {
        /// Trajectory CSVs produced by `run`.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Destination for the merged CSV.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOOPSIM_LOG", "info"))
        .format_timestamp(None)
        .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            checkpoint_every,
        } => cmd_run(&config, &out, checkpoint_every),
        Command::Resume { manifest } => cmd_resume(&manifest),
        Command::Compare { inputs, out } => cmd_compare(&inputs, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
