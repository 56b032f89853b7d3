use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use wrapcam::dataset::{records_for_source, write_record, AugmentConfig, DatasetSource};
use wrapcam::scene::SceneSpec;

use crate::args::{parse_size, CodecArgs};
use crate::exit;

#[derive(clap::Args)]
pub struct Args {
    /// Directory of HDR sources (*.pfm, *.hdr), read in file-name order
    #[arg(long)]
    src: Option<PathBuf>,
    /// JSON file holding an array of scene specifications, appended after --src
    #[arg(long)]
    scenes: Option<PathBuf>,
    /// Output directory for records and manifest.jsonl
    #[arg(short, long)]
    out_dir: PathBuf,
    /// Exposure factors applied to every source
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    exposures: Vec<f64>,
    /// Crop size
    #[arg(long, value_parser = parse_size, default_value = "256x256")]
    crop: (usize, usize),
    /// Random crops per source and exposure
    #[arg(long, default_value_t = 1)]
    crops: usize,
    #[command(flatten)]
    codec: CodecArgs,
}

fn hdr_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("pfm" | "hdr")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn run(args: Args) -> anyhow::Result<()> {
    if args.src.is_none() && args.scenes.is_none() {
        return Err(exit::usage("give --src, --scenes or both"));
    }
    let params = args.codec.params()?;
    let aug = AugmentConfig {
        exposure_factors: args.exposures.clone(),
        crop: args.crop,
        crops_per_image: args.crops,
        seed: args.codec.seed,
    };
    aug.validate()?;

    let mut sources: Vec<DatasetSource> = Vec::new();
    if let Some(dir) = &args.src {
        sources.extend(hdr_files(dir)?.into_iter().map(DatasetSource::Path));
    }
    if let Some(path) = &args.scenes {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let specs: Vec<SceneSpec> = serde_json::from_str(&text)
            .with_context(|| format!("malformed scene list {}", path.display()))?;
        sources.extend(specs.into_iter().map(DatasetSource::Scene));
    }
    if sources.is_empty() {
        return Err(exit::usage("no sources found"));
    }
    super::create_dir(&args.out_dir)?;

    // a fixed index block per source keeps record seeds independent of scheduling
    let per_source = aug.exposure_factors.len() * aug.crops_per_image;
    let outcomes: Vec<_> = sources
        .par_iter()
        .enumerate()
        .map(|(i, src)| {
            let records = records_for_source(src, i, i * per_source, &params, &aug)?;
            records
                .iter()
                .map(|r| write_record(r, &args.out_dir))
                .collect::<wrapcam::Result<Vec<_>>>()
        })
        .collect();

    let mut entries = Vec::new();
    let mut skipped = 0;
    for (src, outcome) in sources.iter().zip(outcomes) {
        match outcome {
            Ok(e) => entries.extend(e),
            Err(
                e @ (wrapcam::Error::Io { .. }
                | wrapcam::Error::Format { .. }
                | wrapcam::Error::TooSmall(_)),
            ) => {
                log::warn!("skipping source {}: {e}", src.id());
                skipped += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if entries.is_empty() {
        return Err(wrapcam::Error::EmptyDataset { skipped }.into());
    }

    let manifest = args.out_dir.join("manifest.jsonl");
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&manifest)
            .with_context(|| format!("cannot write {}", manifest.display()))?,
    );
    for e in &entries {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    log::info!("{} records, {skipped} sources skipped", entries.len());
    Ok(())
}
