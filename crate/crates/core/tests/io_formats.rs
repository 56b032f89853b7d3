use std::path::{Path, PathBuf};

use proptest::prelude::*;
use wrapcam::error::FormatErrorKind;
use wrapcam::io::{
    read_hdr, read_hdr_with_stats, read_sensor_png, read_winding_png, sensor_code, write_hdr,
    write_sensor_png, write_winding_png,
};
use wrapcam::{encode, CodecParams, Error, Image, IrradianceImage, SensorImage};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn pfm_fixtures() {
    let img = read_hdr(fixture("single_half.pfm")).unwrap();
    assert_eq!(img.dims(), (1, 1, 1));
    assert_eq!(img.data(), &[0.5]);

    // stored bottom row first: [0.25, 1.5] then [3.0, 0.125]
    let img = read_hdr(fixture("gray_2x2_be.pfm")).unwrap();
    assert_eq!(img.data(), &[3.0, 0.125, 0.25, 1.5]);

    let img = read_hdr(fixture("rgb_1x2_le.pfm")).unwrap();
    assert_eq!(img.dims(), (1, 2, 3));
    assert_eq!(img.data(), &[4.0, 8.0, 0.0625, 0.5, 1.0, 2.0]);

    let r = read_hdr_with_stats(fixture("negative_le.pfm")).unwrap();
    assert_eq!(r.clamped, 1);
    assert_eq!(r.image.data(), &[0.0, 0.75, 1e-3f32 as f64]);
}

#[test]
fn rgbe_fixtures() {
    let img = read_hdr(fixture("single_pixel.hdr")).unwrap();
    assert_eq!(img.data(), &[1.0, 1.0, 1.0]);

    let img = read_hdr(fixture("rle_8x2.hdr")).unwrap();
    assert_eq!(img.dims(), (8, 2, 3));
    // exponent 130 scales mantissas by 1/64
    let r: Vec<f64> = (0..8).map(|x| img.get(x, 0, 0)).collect();
    let g: Vec<f64> = (0..8).map(|x| img.get(x, 0, 1)).collect();
    let b: Vec<f64> = (0..8).map(|x| img.get(x, 0, 2)).collect();
    assert_eq!(r, vec![2.0; 8]);
    assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]);
    assert_eq!(
        b,
        vec![
            1.0,
            1.0,
            1.0,
            1.0,
            1.0 / 64.0,
            2.0 / 64.0,
            3.0 / 64.0,
            4.0 / 64.0
        ]
    );
    // second row: (128, 64, 32) at exponent 129 repeated 7 times, then a zero pixel
    for x in 0..7 {
        assert_eq!(
            [img.get(x, 1, 0), img.get(x, 1, 1), img.get(x, 1, 2)],
            [1.0, 0.5, 0.25]
        );
    }
    assert_eq!(
        [img.get(7, 1, 0), img.get(7, 1, 1), img.get(7, 1, 2)],
        [0.0; 3]
    );
}

#[test]
fn distinct_diagnostics() {
    let kind = |p: &Path| match read_hdr(p) {
        Err(Error::Format { kind, .. }) => kind,
        other => panic!("{other:?}"),
    };
    assert_eq!(
        kind(&fixture("truncated.pfm")),
        FormatErrorKind::TruncatedPayload
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pfm");
    std::fs::write(&bad, b"PF\nx 2\n-1.0\n").unwrap();
    assert_eq!(kind(&bad), FormatErrorKind::MalformedHeader);
    std::fs::write(&bad, b"P6\n1 1\n255\n\0\0\0").unwrap();
    assert_eq!(kind(&bad), FormatErrorKind::Unsupported);
    assert!(matches!(
        read_hdr(dir.path().join("missing.pfm")),
        Err(Error::Io { .. })
    ));
}

#[test]
fn sensor_png_codes() {
    assert_eq!(sensor_code(1.0 - f64::EPSILON / 2.0, 1.0), 65535);
    assert_eq!(sensor_code(0.0, 1.0), 0);
    assert_eq!(sensor_code(0.5, 2.0), 16384);

    let dir = tempfile::tempdir().unwrap();
    let p = CodecParams::mantissa(2.0, 1.0).with_bits(8);
    let img = IrradianceImage::new(4, 3, 3, (0..36).map(|i| 0.3 * i as f64).collect()).unwrap();
    let (s, w) = encode(&img, &p).unwrap();
    write_sensor_png(&s, &dir.path().join("s.png")).unwrap();
    write_winding_png(&w, &dir.path().join("w.png")).unwrap();
    let back = read_sensor_png(&dir.path().join("s.png"), &p).unwrap();
    for (a, b) in s.data().iter().zip(back.data()) {
        assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-15);
    }
    assert_eq!(read_winding_png(&dir.path().join("w.png")).unwrap(), w);
}

#[test]
fn winding_png_limits() {
    let dir = tempfile::tempdir().unwrap();
    let ok = Image::new(3, 1, 1, vec![0u32, 3, 65535]).unwrap();
    write_winding_png(&ok, &dir.path().join("ok.png")).unwrap();
    assert_eq!(read_winding_png(&dir.path().join("ok.png")).unwrap(), ok);
    let big = Image::new(1, 1, 1, vec![65536u32]).unwrap();
    assert!(matches!(
        write_winding_png(&big, &dir.path().join("big.png")),
        Err(Error::WindingOverflow { .. })
    ));
    let unwritable = dir.path().join("no/such/dir/w.png");
    assert!(matches!(
        write_winding_png(&ok, &unwritable),
        Err(Error::Io { .. })
    ));
}

#[test]
fn sensor_top_code_reads_below_i_max() {
    let dir = tempfile::tempdir().unwrap();
    let p = CodecParams::modulo(1.0);
    let s = SensorImage::new(Image::new(1, 1, 1, vec![1.0 - 1e-17]).unwrap(), p).unwrap();
    write_sensor_png(&s, &dir.path().join("s.png")).unwrap();
    let back = read_sensor_png(&dir.path().join("s.png"), &p).unwrap();
    assert!(back.data()[0] < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfm_roundtrip_is_bit_exact(
        w in 1usize..9,
        h in 1usize..9,
        rgb in any::<bool>(),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let c = if rgb { 3 } else { 1 };
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..w * h * c)
            .map(|_| r.random_range(0.0f32..1e6) as f64)
            .collect();
        let img = IrradianceImage::new(w, h, c, data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pfm");
        write_hdr(&img, &path).unwrap();
        let back = read_hdr(&path).unwrap();
        prop_assert_eq!(back.dims(), img.dims());
        for (a, b) in back.data().iter().zip(img.data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
