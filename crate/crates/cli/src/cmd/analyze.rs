use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Context;
use serde::Serialize;
use wrapcam::histogram::log_histogram;
use wrapcam::io::read_hdr;
use wrapcam::metrics::wrap_count_per_channel;
use wrapcam::recoverability::Violation;
use wrapcam::{check_recoverable, encode, max_dynamic_range, CodecParams, EncodingKind};

use crate::args::CodecArgs;
use crate::exit;

#[derive(clap::Args)]
pub struct Args {
    /// HDR input (PFM or Radiance .hdr)
    input: PathBuf,
    /// Output directory for recoverability.json, histogram.tsv, wraps.tsv and dr.tsv
    #[arg(short, long)]
    out_dir: PathBuf,
    /// Log-spaced histogram bins
    #[arg(long, default_value_t = 64)]
    bins: usize,
    /// Pixel count N used by the dynamic-range formulas (default: image width)
    #[arg(long)]
    dr_pixels: Option<usize>,
    /// Violations listed per encoding in recoverability.json
    #[arg(long, default_value_t = 20)]
    max_violations: usize,
    /// Shared parameters; both encodings are analyzed with --alpha and --imax
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Serialize)]
struct Recoverability {
    kind: EncodingKind,
    i_max: f64,
    alpha: f64,
    total_pairs: usize,
    violation_count: usize,
    satisfied: bool,
    violations: Vec<Violation>,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    if args.bins < 2 {
        return Err(exit::usage("--bins must be >= 2"));
    }
    if args.dr_pixels.is_some_and(|n| n < 2) {
        return Err(exit::usage("--dr-pixels must be >= 2"));
    }
    let base = args.codec.params()?;
    let img = read_hdr(&args.input)?;
    super::create_dir(&args.out_dir)?;

    let kinds = [
        CodecParams {
            kind: EncodingKind::Modulo,
            ..base
        },
        CodecParams {
            kind: EncodingKind::Mantissa,
            ..base
        },
    ];
    let mut recoverability = Vec::new();
    let mut wraps = String::from("kind\tchannel\twrap_count\tmax_winding\n");
    for p in kinds {
        // mantissa needs I_max >= 1; report it as skipped rather than failing
        if let Err(e) = p.validate() {
            log::warn!("skipping {} analysis: {e}", p.kind);
            continue;
        }
        let r = check_recoverable(&img, &p)?;
        recoverability.push(Recoverability {
            kind: p.kind,
            i_max: p.i_max,
            alpha: p.alpha,
            total_pairs: r.total_pairs,
            violation_count: r.violations.len(),
            satisfied: r.satisfied,
            violations: r.violations.into_iter().take(args.max_violations).collect(),
        });

        let (_, winding) = encode(
            &img,
            &CodecParams {
                bits: 0,
                noise_sigma: 0.0,
                ..p
            },
        )?;
        let per = wrap_count_per_channel(&winding);
        for (c, n) in per.iter().enumerate() {
            let max = winding.channel(c).data().iter().copied().max().unwrap_or(0);
            writeln!(wraps, "{}\t{c}\t{n}\t{max}", p.kind)?;
        }
        let max = winding.data().iter().copied().max().unwrap_or(0);
        writeln!(wraps, "{}\tall\t{}\t{max}", p.kind, per.iter().sum::<u64>())?;
    }

    let hist = log_histogram(&img, args.bins)?;
    let edges = hist.edges();
    let mut h = String::from("bin\tlower\tupper");
    for c in 0..img.channels() {
        write!(h, "\tc{c}")?;
    }
    h.push('\n');
    for b in 0..hist.n_bins() {
        match edges.get(b..b + 2) {
            Some(e) => write!(h, "{b}\t{:e}\t{:e}", e[0], e[1])?,
            None => write!(h, "{b}\tNA\tNA")?,
        }
        for c in 0..img.channels() {
            write!(h, "\t{}", hist.counts[c][b])?;
        }
        h.push('\n');
    }
    write!(h, "zero\t0\t0")?;
    for z in &hist.zeros {
        write!(h, "\t{z}")?;
    }
    h.push('\n');

    let n = args.dr_pixels.unwrap_or(img.width());
    let mut dr = String::from("kind\tn_pixels\ti_max\tdr_db\tnote\n");
    for kind in [EncodingKind::Modulo, EncodingKind::Mantissa] {
        match max_dynamic_range(kind, n, base.i_max) {
            Ok(e) => writeln!(dr, "{kind}\t{n}\t{}\t{}\t", base.i_max, e.dr_db)?,
            Err(e) => writeln!(dr, "{kind}\t{n}\t{}\tNA\t{e}", base.i_max)?,
        }
    }

    let write = |name: &str, text: &str| {
        let p = args.out_dir.join(name);
        std::fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))
    };
    let mut json = serde_json::to_string_pretty(&recoverability)?;
    json.push('\n');
    write("recoverability.json", &json)?;
    write("histogram.tsv", &h)?;
    write("wraps.tsv", &wraps)?;
    write("dr.tsv", &dr)?;
    Ok(())
}
