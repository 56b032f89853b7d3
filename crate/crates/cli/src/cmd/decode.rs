use std::path::{Path, PathBuf};

use serde::Serialize;
use wrapcam::io::{decode_pfm, read_hdr, read_sensor_png, write_hdr, write_winding_png};
use wrapcam::metrics::{inf_sentinel, psnr, wrap_count};
use wrapcam::unwrap::solve_winding;
use wrapcam::{reconstruct, CodecParams, DecodeReport, SensorImage};

use crate::args::SolverArgs;
use crate::exit;
use crate::meta::{default_sidecar, SensorMeta};

#[derive(clap::Args)]
pub struct Args {
    /// Sensor image (16-bit PNG or PFM)
    #[arg(long)]
    sensor: PathBuf,
    /// Metadata sidecar (default: meta.json next to the sensor image)
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Reconstructed HDR image (PFM)
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the recovered winding map as 16-bit PNG
    #[arg(long)]
    winding_out: Option<PathBuf>,
    /// Decode report (JSON); printed to stdout when omitted
    #[arg(long)]
    report: Option<PathBuf>,
    /// Ground truth for a PSNR entry in the report
    #[arg(long)]
    reference: Option<PathBuf>,
    /// PSNR peak (default: maximum of the reference)
    #[arg(long, allow_negative_numbers = true, requires = "reference")]
    peak: Option<f64>,
    /// Exit with status 4 when the solver hit its label ceiling
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Serialize)]
struct Report<'a> {
    sensor: String,
    output: String,
    params: CodecParams,
    #[serde(flatten)]
    decode: &'a DecodeReport,
    max_winding: u32,
    wrap_count: u64,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_inf")]
    psnr_db: Option<f64>,
}

mod opt_inf {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => super::inf_sentinel::serialize(x, s),
            None => s.serialize_none(),
        }
    }
}

fn read_sensor(path: &Path, params: &CodecParams) -> anyhow::Result<SensorImage> {
    let is_pfm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pfm"));
    if is_pfm {
        let bytes = std::fs::read(path).map_err(|e| wrapcam::Error::io(path, e))?;
        Ok(SensorImage::new(decode_pfm(&bytes, path)?, *params)?)
    } else {
        Ok(read_sensor_png(path, params)?)
    }
}

pub fn run(args: Args) -> anyhow::Result<()> {
    args.solver.precheck()?;
    if let Some(p) = args.peak {
        if !(p.is_finite() && p > 0.0) {
            return Err(exit::usage(format!("--peak must be > 0, got {p}")));
        }
    }
    let meta_path = args
        .meta
        .clone()
        .unwrap_or_else(|| default_sidecar(&args.sensor));
    let meta = SensorMeta::read(&meta_path)?;
    let solver = args.solver.solver(&meta.params)?;

    let sensor = read_sensor(&args.sensor, &meta.params)?;
    if sensor.dims() != (meta.width, meta.height, meta.channels) {
        return Err(wrapcam::Error::DimensionMismatch {
            expected: (meta.width, meta.height, meta.channels),
            found: sensor.dims(),
        }
        .into());
    }
    let (winding, decode) = solve_winding(&sensor, &solver)?;
    let out = reconstruct(&sensor, &winding)?;
    write_hdr(&out, &args.output)?;
    if let Some(p) = &args.winding_out {
        write_winding_png(&winding, p)?;
    }

    let psnr_db = match &args.reference {
        Some(r) => Some(psnr(&out, &read_hdr(r)?, args.peak)?),
        None => None,
    };
    let report = Report {
        sensor: args.sensor.display().to_string(),
        output: args.output.display().to_string(),
        params: meta.params,
        decode: &decode,
        max_winding: winding.data().iter().copied().max().unwrap_or(0),
        wrap_count: wrap_count(&winding),
        psnr_db,
    };
    super::emit_json(&report, args.report.as_deref())?;

    // the solver already logged the ceiling hit; --strict turns it into a failure
    if args.strict && decode.ceiling_clamped > 0 {
        return Err(exit::capacity(format!(
            "{} samples needed windings above --max-label {}; {} boundaries left unexplained",
            decode.ceiling_clamped, args.solver.max_label, decode.residual_edges
        )));
    }
    Ok(())
}
