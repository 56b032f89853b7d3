//! Snapshot HDR imaging with wrapping in-pixel encodings.
//!
//! The crate covers the full simulation loop:
//!
//! - [`codec`]: the modulo and mantissa forward models (wrap, quantize, add
//!   read noise) and the inverse reconstruction from winding numbers.
//! - [`recoverability`]: pairwise recoverability conditions, a greedy 1D
//!   unwrapper and dynamic-range formulas.
//! - [`unwrap`]: 2D winding recovery (wrap-edge detection, region growing,
//!   alpha-expansion with min-cut).
//! - [`io`], [`scene`], [`dataset`], [`histogram`]: HDR file formats, analytic
//!   test scenes and supervised dataset export.
//! - [`metrics`]: tonemapping, PSNR, SSIM, MS-SSIM and wrap counting.

pub mod codec;
pub mod dataset;
pub mod error;
pub mod histogram;
pub mod image;
pub mod io;
pub mod metrics;
pub mod recoverability;
pub mod scene;
pub mod unwrap;

pub use codec::{
    encode, encode_detailed, quantization_error_bounds, quantize, reconstruct, CodecParams,
    Encoded, EncodingKind, QuantizationBounds, SensorImage,
};
pub use error::{Error, FormatErrorKind, Result};
pub use image::{Image, IrradianceImage, WindingMap};
pub use recoverability::{
    check_recoverable, max_dynamic_range, unwrap_sequential_1d, DynamicRangeEstimate,
    RecoverabilityReport,
};
pub use unwrap::{decode, DecodeReport, MrfConfig, Solver, WrapEdgeMask};
