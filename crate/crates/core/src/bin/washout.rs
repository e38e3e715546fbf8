use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use washout::io::{parse_config_for, preset_text, run, Mode, RunOptions, PRESETS};

#[derive(Parser)]
#[command(name = "washout", version, about = "Shot-noise dissipation suppression simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Averaged fidelity curve against free dynamics.
    Simulate(RunArgs),
    /// (J, W) fidelity grid at the probe times.
    Sweep(RunArgs),
    /// Suppression gain across memory rates.
    MarkovScan(RunArgs),
    /// Washout integrand for one control realization.
    Washout(RunArgs),
    /// Statistical checks of the shot and OU generators.
    NoiseTest(RunArgs),
    /// Compare the two fidelity conventions.
    Crosscheck(RunArgs),
    /// Print a named parameter set as config text.
    Preset { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Simulate(a) => (Mode::Simulate, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::MarkovScan(a) => (Mode::MarkovScan, a),
        Command::Washout(a) => (Mode::Washout, a),
        Command::NoiseTest(a) => (Mode::NoiseTest, a),
        Command::Crosscheck(a) => (Mode::Crosscheck, a),
        Command::Preset { name } => {
            return match preset_text(&name) {
                Some(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!("unknown preset `{name}`; available: {}", PRESETS.join(", "));
                    ExitCode::from(2)
                }
            };
        }
    };

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", args.config.display());
            return ExitCode::from(4);
        }
    };
    let mut config = match parse_config_for(&text, mode) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let options = RunOptions {
        out_dir: args.out,
        threads: args.threads,
        wall_clock_override: None,
    };
    match run(&config, &options) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
