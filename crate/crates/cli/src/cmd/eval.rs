use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;
use wrapcam::io::{read_hdr, read_winding_png};
use wrapcam::metrics::{evaluate, EvalReport};

use crate::exit;

#[derive(clap::Args)]
pub struct Args {
    /// Reconstruction, or a directory of reconstructions
    #[arg(long)]
    pred: PathBuf,
    /// Ground truth, or a directory holding files of the same names
    #[arg(long)]
    gt: PathBuf,
    /// PSNR peak (default: maximum of each ground-truth image)
    #[arg(long, allow_negative_numbers = true)]
    peak: Option<f64>,
    /// Winding map (16-bit PNG) whose wrap count goes into the report
    #[arg(long)]
    winding: Option<PathBuf>,
    /// Report file (JSON lines); printed to stdout when omitted
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Record {
    pred: String,
    gt: String,
    #[serde(flatten)]
    metrics: EvalReport,
}

fn pairs(pred: &Path, gt: &Path) -> anyhow::Result<Vec<(PathBuf, PathBuf)>> {
    if !pred.is_dir() {
        return Ok(vec![(pred.to_path_buf(), gt.to_path_buf())]);
    }
    if !gt.is_dir() {
        return Err(exit::usage(
            "--pred is a directory, so --gt must be one too",
        ));
    }
    let mut out = Vec::new();
    for entry in
        std::fs::read_dir(pred).with_context(|| format!("cannot list {}", pred.display()))?
    {
        let path = entry?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("pfm" | "hdr")) {
            let name = path.file_name().expect("listed files have names");
            out.push((path.clone(), gt.join(name)));
        }
    }
    out.sort();
    Ok(out)
}

pub fn run(args: Args) -> anyhow::Result<()> {
    if let Some(p) = args.peak {
        if !(p.is_finite() && p > 0.0) {
            return Err(exit::usage(format!("--peak must be > 0, got {p}")));
        }
    }
    let pairs = pairs(&args.pred, &args.gt)?;
    if args.winding.is_some() && pairs.len() != 1 {
        return Err(exit::usage("--winding needs a single --pred/--gt pair"));
    }
    let winding = args.winding.as_deref().map(read_winding_png).transpose()?;

    let records = pairs
        .par_iter()
        .map(|(p, g)| -> anyhow::Result<Record> {
            let pred = read_hdr(p)?;
            let gt = read_hdr(g)?;
            let metrics = evaluate(&pred, &gt, args.peak, winding.as_ref())
                .with_context(|| format!("evaluating {} against {}", p.display(), g.display()))?;
            Ok(Record {
                pred: p.display().to_string(),
                gt: g.display().to_string(),
                metrics,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut text = Vec::new();
    for r in &records {
        serde_json::to_writer(&mut text, r)?;
        text.push(b'\n');
    }
    match &args.report {
        Some(p) => {
            std::fs::write(p, &text).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => std::io::stdout().write_all(&text)?,
    }
    Ok(())
}
