use std::path::PathBuf;

use wrapcam::io::{read_hdr, write_pfm, write_sensor_png, write_winding_png};
use wrapcam::metrics::wrap_count;

use crate::args::CodecArgs;
use crate::meta::{SensorMeta, FORMAT, VERSION};

#[derive(clap::Args)]
pub struct Args {
    /// HDR input (PFM or Radiance .hdr)
    input: PathBuf,
    /// Output directory for sensor.png, sensor.pfm, winding.png and meta.json
    #[arg(short, long)]
    out_dir: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let params = args.codec.params()?;
    let img = read_hdr(&args.input)?;
    let (sensor, winding) = wrapcam::encode(&img, &params)?;
    super::create_dir(&args.out_dir)?;

    let (width, height, channels) = img.dims();
    let meta = SensorMeta {
        format: FORMAT.into(),
        version: VERSION,
        params,
        width,
        height,
        channels,
        source: args.input.display().to_string(),
        sensor_png: "sensor.png".into(),
        sensor_pfm: "sensor.pfm".into(),
        winding_png: "winding.png".into(),
        max_winding: winding.data().iter().copied().max().unwrap_or(0),
        wrap_count: wrap_count(&winding),
    };
    write_sensor_png(&sensor, &args.out_dir.join(&meta.sensor_png))?;
    write_pfm(sensor.image(), &args.out_dir.join(&meta.sensor_pfm))?;
    write_winding_png(&winding, &args.out_dir.join(&meta.winding_png))?;
    meta.write(&args.out_dir.join("meta.json"))?;
    log::info!(
        "{}: max winding {}, {} wraps",
        args.input.display(),
        meta.max_winding,
        meta.wrap_count
    );
    Ok(())
}
