use std::path::PathBuf;

use anyhow::Context;
use clap::Subcommand;
use wrapcam::io::write_hdr;
use wrapcam::scene::{generate_scene, SceneSpec};

#[derive(clap::Args)]
pub struct Args {
    /// Output PFM
    #[arg(short, long)]
    output: PathBuf,
    #[command(subcommand)]
    spec: Spec,
}

#[derive(Subcommand)]
enum Spec {
    /// One-row linear ramp from 0 to AMPLITUDE over N samples
    Ramp {
        #[arg(long, allow_negative_numbers = true)]
        amplitude: f64,
        #[arg(long)]
        n: usize,
    },
    /// Diagonal ramp from 0 to AMPLITUDE
    Ramp2d {
        #[arg(long, allow_negative_numbers = true)]
        amplitude: f64,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
    },
    /// Centered isotropic Gaussian on a square image
    Gaussian {
        #[arg(long)]
        size: usize,
        #[arg(long, allow_negative_numbers = true)]
        amplitude: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
    },
    /// Any scene specification given as a JSON file
    Json { path: PathBuf },
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let spec = match args.spec {
        Spec::Ramp { amplitude, n } => SceneSpec::Ramp1d { amplitude, n },
        Spec::Ramp2d {
            amplitude,
            width,
            height,
        } => SceneSpec::Ramp2d {
            amplitude,
            width,
            height,
        },
        Spec::Gaussian {
            size,
            amplitude,
            sigma,
        } => SceneSpec::centered_gaussian(size, amplitude, sigma),
        Spec::Json { path } => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("malformed scene {}", path.display()))?
        }
    };
    let img = generate_scene(&spec)?;
    write_hdr(&img, &args.output)?;
    Ok(())
}
