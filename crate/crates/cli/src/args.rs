use clap::{Args, ValueEnum};
use wrapcam::{CodecParams, EncodingKind, MrfConfig, Solver};

use crate::exit;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Modulo,
    Mantissa,
}

impl From<Kind> for EncodingKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Modulo => EncodingKind::Modulo,
            Kind::Mantissa => EncodingKind::Mantissa,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct CodecArgs {
    /// Encoding applied in the pixel
    #[arg(long, value_enum, default_value_t = Kind::Mantissa)]
    pub kind: Kind,
    /// Log base of the mantissa encoding
    #[arg(long, allow_negative_numbers = true, default_value_t = 2.0)]
    pub alpha: f64,
    /// Wrap period (well capacity) in sensor units
    #[arg(long = "imax", allow_negative_numbers = true, default_value_t = 1.0)]
    pub i_max: f64,
    /// Quantizer bit depth, 0 = no quantization
    #[arg(long, default_value_t = 0)]
    pub bits: u8,
    /// Read-noise standard deviation in sensor units
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub noise_sigma: f64,
    /// Seed for noise and augmentation
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl CodecArgs {
    pub fn params(&self) -> anyhow::Result<CodecParams> {
        let p = CodecParams {
            kind: self.kind.into(),
            alpha: self.alpha,
            i_max: self.i_max,
            bits: self.bits,
            noise_sigma: self.noise_sigma,
            seed: self.seed,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverKind {
    Floodfill,
    Mrf,
}

#[derive(Args, Clone, Debug)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverKind::Floodfill)]
    pub solver: SolverKind,
    /// Wrap-edge threshold (default I_max/2)
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// Highest winding label the MRF solver considers
    #[arg(long, default_value_t = 16)]
    pub max_label: u32,
    /// MRF smoothness weight
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub lambda: f64,
    /// MRF potential truncation (default 2·I_max)
    #[arg(long, allow_negative_numbers = true)]
    pub trunc: Option<f64>,
    /// Maximum alpha-expansion sweeps
    #[arg(long, default_value_t = 5)]
    pub max_sweeps: usize,
}

impl SolverArgs {
    /// Checks the flags that do not depend on the sensor's parameters.
    pub fn precheck(&self) -> anyhow::Result<()> {
        if let Some(t) = self.tau {
            if !(t.is_finite() && t > 0.0) {
                return Err(exit::usage(format!("--tau must be > 0, got {t}")));
            }
        }
        if matches!(self.solver, SolverKind::Mrf) {
            self.mrf(1.0).validate()?;
        }
        Ok(())
    }

    fn mrf(&self, i_max: f64) -> MrfConfig {
        MrfConfig {
            max_label: self.max_label,
            lambda: self.lambda,
            trunc: self.trunc.unwrap_or(2.0 * i_max),
            max_sweeps: self.max_sweeps,
            tau: self.tau,
        }
    }

    pub fn solver(&self, params: &CodecParams) -> anyhow::Result<Solver> {
        if let Some(t) = self.tau {
            if t >= params.i_max {
                return Err(exit::usage(format!(
                    "--tau must be below I_max = {}, got {t}",
                    params.i_max
                )));
            }
        }
        Ok(match self.solver {
            SolverKind::Floodfill => Solver::FloodFill { tau: self.tau },
            SolverKind::Mrf => {
                let c = self.mrf(params.i_max);
                c.validate()?;
                Solver::Mrf(c)
            }
        })
    }
}

/// `WIDTHxHEIGHT`.
pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got '{s}'"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width in '{s}'"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height in '{s}'"))?;
    if w == 0 || h == 0 {
        return Err("crop sides must be >= 1".into());
    }
    Ok((w, h))
}
