use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hyperdeform_cli::config::Experiment;
use hyperdeform_cli::{execute, prepare, Status};

#[derive(Parser)]
#[command(name = "hyperdeform", version, about = "Experiments on compactly supported deformations of the hyperbolic disk")]
struct Cli {
    /// List the available experiments and exit.
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's `output`, else out/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sampler seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    Curvature(RunArgs),
    Moebius(RunArgs),
    Schwarzian(RunArgs),
    Raytransform(RunArgs),
    Kernel(RunArgs),
    Decompose(RunArgs),
    Variation(RunArgs),
    Pipeline(RunArgs),
    Volume(RunArgs),
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::Curvature(a) => (Experiment::Curvature, a),
            Command::Moebius(a) => (Experiment::Moebius, a),
            Command::Schwarzian(a) => (Experiment::Schwarzian, a),
            Command::Raytransform(a) => (Experiment::Raytransform, a),
            Command::Kernel(a) => (Experiment::Kernel, a),
            Command::Decompose(a) => (Experiment::Decompose, a),
            Command::Variation(a) => (Experiment::Variation, a),
            Command::Pipeline(a) => (Experiment::Pipeline, a),
            Command::Volume(a) => (Experiment::Volume, a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for e in Experiment::ALL {
            println!("{:<13} {}", e.name(), e.about());
        }
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("no experiment given; see --list");
        return ExitCode::from(Status::ConfigError as u8);
    };
    let (experiment, args) = command.split();
    let (cfg, dir) = match prepare(experiment, args.config.as_deref(), args.out, args.seed) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(Status::ConfigError as u8);
        }
    };
    match execute(experiment, &cfg, &dir) {
        Ok(outcome) => {
            print!("{}", outcome.summary(experiment.name()));
            println!("artifacts in {}", dir.display());
            let status = if outcome.passed() { Status::Passed } else { Status::Failed };
            ExitCode::from(status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::ComputeError as u8)
        }
    }
}
