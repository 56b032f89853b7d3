mod args;
mod cmd;
mod exit;
mod meta;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "wrapcam",
    version,
    about = "Wrapped-sensor HDR encoding, unwrapping and evaluation"
)]
struct Cli {
    /// Worker threads for batch work (default: all cores)
    #[arg(long, global = true, env = "WRAPCAM_THREADS")]
    threads: Option<usize>,

    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wrap an HDR image into a sensor image, winding map and metadata sidecar
    Encode(cmd::encode::Args),
    /// Recover windings from a sensor image and reconstruct the HDR image
    Decode(cmd::decode::Args),
    /// Synthesize a supervised dataset from HDR files and generated scenes
    Dataset(cmd::dataset::Args),
    /// Compare reconstructions against ground truth
    Eval(cmd::eval::Args),
    /// Recoverability, log-histogram, wrap-count and dynamic-range tables
    Analyze(cmd::analyze::Args),
    /// Write a synthetic test scene as PFM
    Scene(cmd::scene::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = (|| -> anyhow::Result<()> {
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(exit::usage("--threads must be >= 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
        match cli.command {
            Command::Encode(a) => cmd::encode::run(a),
            Command::Decode(a) => cmd::decode::run(a),
            Command::Dataset(a) => cmd::dataset::run(a),
            Command::Eval(a) => cmd::eval::run(a),
            Command::Analyze(a) => cmd::analyze::run(a),
            Command::Scene(a) => cmd::scene::run(a),
        }
    })();

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code(&e))
        }
    }
}
