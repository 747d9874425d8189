use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mildsol_cli::{cmd_optimize, cmd_solve, cmd_verify, RunOptions};

#[derive(Parser)]
#[command(name = "mildsol", version, about = "Mild solutions of impulsive inclusions with fading memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces solver.h.
    #[arg(long)]
    grid_override: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve with the configured selection and certify the result.
    Solve(Common),
    /// Run the property suite.
    Verify(Common),
    /// Optimize the configured cost over the sampled solution set.
    Optimize(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (run, args): (fn(&RunOptions) -> _, Common) = match cli.command {
        Command::Solve(a) => (cmd_solve, a),
        Command::Verify(a) => (cmd_verify, a),
        Command::Optimize(a) => (cmd_optimize, a),
    };
    let opts = RunOptions {
        config: args.config,
        out: args.out,
        grid_override: args.grid_override,
        seed: args.seed,
    };
    match run(&opts) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
