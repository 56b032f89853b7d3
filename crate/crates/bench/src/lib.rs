//! Shared inputs for the criterion benches.

use wrapcam::scene::{generate_scene, Blob, SceneSpec};
use wrapcam::{encode, CodecParams, IrradianceImage, SensorImage};

/// Two Gaussians on a gentle ramp, steep enough to wrap many times but
/// within the greedy-unwrapping step bound.
pub fn smooth_scene(size: usize) -> IrradianceImage {
    let s = size as f64;
    generate_scene(&SceneSpec::GaussianMixture {
        width: size,
        height: size,
        blobs: vec![
            Blob {
                amplitude: 0.08 * s,
                center: (0.3 * s, 0.4 * s),
                sigma: 0.2 * s,
            },
            Blob {
                amplitude: 0.05 * s,
                center: (0.7 * s, 0.6 * s),
                sigma: 0.15 * s,
            },
        ],
        offset: 0.2,
        gradient: (0.05, 0.03),
    })
    .expect("valid scene")
}

pub fn wrapped(size: usize, params: &CodecParams) -> SensorImage {
    encode(&smooth_scene(size), params).expect("encodable").0
}
