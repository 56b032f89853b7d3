//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::{max_relative_error, random_scene, rng, Shape};
use rand::Rng;
use wrapcam::io::{decode_pfm, encode_pfm, read_hdr};
use wrapcam::metrics::{msssim, psnr, ssim, wrap_count};
use wrapcam::recoverability::pair_recoverable;
use wrapcam::scene::{generate_scene, SceneSpec};
use wrapcam::unwrap::maxflow::FlowGraph;
use wrapcam::{
    check_recoverable, decode, encode, max_dynamic_range, quantization_error_bounds, reconstruct,
    CodecParams, EncodingKind, Image, IrradianceImage, MrfConfig, Solver,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("roundtrip exactness", roundtrip_exactness),
        ("recoverability predicates", recoverability_predicates),
        ("gaussian winding counts", gaussian_windings),
        ("ramp wrap positions", ramp_wraps),
        ("dynamic range formulas", dynamic_range),
        ("quantization law", quantization_law),
        ("mrf solver", mrf_solver),
        ("noise ordering", noise_ordering),
        ("metrics oracle", metrics_oracle),
        ("format golden files", format_golden),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn both() -> [CodecParams; 2] {
    [CodecParams::modulo(1.0), CodecParams::mantissa(2.0, 1.0)]
}

fn roundtrip_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..200 {
        let mut r = rng(1000 + seed);
        for p in both() {
            let img = random_scene(&mut r, 64, 64, Shape::Smooth, &p, 0.45);
            let (s, _) = encode(&img, &p).map_err(|e| e.to_string())?;
            let (out, _) = decode(&s, &Solver::default()).map_err(|e| e.to_string())?;
            worst = worst.max(max_relative_error(&out, &img));
        }
    }
    let elapsed = start.elapsed();
    ensure!(worst <= 1e-9, "max relative error {worst:e} > 1e-9");
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "400 decodes, max rel err {worst:.2e}, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

/// Lattice coordinate scaled to an exact integer (values must carry no bits
/// below 2^-70).
fn fixed(v: f64) -> i128 {
    let scaled = v * 2f64.powi(70);
    let n = scaled as i128;
    assert_eq!(n as f64, scaled, "{v} is not representable at 2^-70");
    n
}

/// Largest number of wraps a pair can straddle over all placements of a
/// wrap lattice of period `t`, enumerated by the offset `s` of the first
/// lattice point after the lower coordinate.
fn max_wraps_straddled(p: f64, q: f64, t: f64) -> i128 {
    let (lo, hi) = (fixed(p.min(q)), fixed(p.max(q)));
    let period = fixed(t);
    let mut offsets: Vec<i128> = (1..=64).map(|k| period * k / 64).collect();
    offsets.push(1);
    offsets
        .into_iter()
        .map(|s| {
            let first = lo + s;
            if first > hi {
                0
            } else {
                (hi - first) / period + 1
            }
        })
        .max()
        .unwrap()
}

fn recoverability_predicates() -> Outcome {
    let settings = [
        CodecParams::modulo(1.0),
        CodecParams::modulo(0.75),
        CodecParams::mantissa(2.0, 1.0),
        CodecParams::mantissa(10.0, 1.5),
        CodecParams::mantissa(std::f64::consts::E, 2.0),
    ];
    let mut r = rng(2);
    let (mut disagreements, mut positives) = (0, 0);
    for i in 0..1000 {
        let p = settings[i % settings.len()];
        let t = p.i_max;
        let boundary = i % 10 == 0;
        let (a, b) = match p.kind {
            EncodingKind::Modulo => {
                // dyadic values keep a ± I_max exact
                let a = r.random_range(64..20 * 1024) as f64 / 1024.0;
                if boundary {
                    (a, a + t)
                } else {
                    let mut b = a + r.random_range(-2.0 * t..2.0 * t);
                    while b < 0.01 {
                        b = a + r.random_range(0.0..2.0 * t);
                    }
                    (a, b)
                }
            }
            EncodingKind::Mantissa if boundary && p.alpha == 2.0 => {
                let k = r.random_range(0..20);
                (2f64.powi(k), 2f64.powi(k + 1))
            }
            EncodingKind::Mantissa => {
                let la = r.random_range(p.log_alpha(t) - 1.0..p.log_alpha(t) + 15.0);
                let lb = la + r.random_range(-2.0 * t..2.0 * t);
                (p.pow_alpha(la), p.pow_alpha(lb))
            }
        };
        let coord = |v: f64| match p.kind {
            EncodingKind::Modulo => v,
            EncodingKind::Mantissa => p.log_alpha(v.max(t)),
        };
        let oracle = max_wraps_straddled(coord(a), coord(b), t) <= 1;
        let predicate = pair_recoverable(&p, a, b);
        positives += predicate as usize;
        if oracle != predicate {
            disagreements += 1;
        }
    }
    ensure!(disagreements == 0, "{disagreements} disagreements");
    Ok(format!(
        "1000 pairs, {positives} recoverable, 0 disagreements"
    ))
}

fn gaussian_windings() -> Outcome {
    let img = generate_scene(&SceneSpec::centered_gaussian(201, 16.0, 40.0))
        .map_err(|e| e.to_string())?;
    let mut max = Vec::new();
    let mut wraps = Vec::new();
    for p in both() {
        let (_, w) = encode(&img, &p).map_err(|e| e.to_string())?;
        max.push(*w.data().iter().max().unwrap());
        wraps.push(wrap_count(&w));
    }
    ensure!(max == [16, 5], "max windings {max:?}");
    ensure!(wraps[1] < wraps[0], "wrap counts {wraps:?}");
    Ok(format!(
        "max W modulo {} mantissa {}, wraps {} vs {}",
        max[0], max[1], wraps[0], wraps[1]
    ))
}

fn wrap_positions(p: &CodecParams, img: &IrradianceImage) -> Vec<usize> {
    let (_, w) = encode(img, p).unwrap();
    let w = w.data();
    (1..w.len()).filter(|&i| w[i] != w[i - 1]).collect()
}

fn ramp_wraps() -> Outcome {
    let n = 501;
    let img =
        generate_scene(&SceneSpec::Ramp1d { amplitude: 5.0, n }).map_err(|e| e.to_string())?;
    let at = |v: f64| v * (n - 1) as f64 / 5.0;
    let expect = [
        (both()[0], vec![1.0, 2.0, 3.0, 4.0, 5.0]),
        (both()[1], vec![1.0, 2.0, 4.0]),
    ];
    let mut found = Vec::new();
    for (p, levels) in expect {
        let got = wrap_positions(&p, &img);
        ensure!(
            got.len() == levels.len(),
            "{:?}: wraps at samples {got:?}",
            p.kind
        );
        for (g, l) in got.iter().zip(&levels) {
            ensure!(
                (*g as f64 - at(*l)).abs() <= 1.0,
                "{:?}: wrap at sample {g}, expected near {}",
                p.kind,
                at(*l)
            );
        }
        found.push(got);
    }
    Ok(format!("modulo {:?}, mantissa {:?}", found[0], found[1]))
}

fn dynamic_range() -> Outcome {
    let m = max_dynamic_range(EncodingKind::Modulo, 256, 1.0)
        .map_err(|e| e.to_string())?
        .dr_db;
    let a = max_dynamic_range(EncodingKind::Mantissa, 256, 2.0)
        .map_err(|e| e.to_string())?
        .dr_db;
    ensure!((m - 24.08).abs() <= 0.01, "modulo {m}");
    ensure!((a - 770.6).abs() <= 0.1, "mantissa {a}");
    ensure!(
        max_dynamic_range(EncodingKind::Mantissa, 256, 1.0).is_err(),
        "I_max = 1 accepted"
    );
    Ok(format!(
        "modulo {m:.3} dB, mantissa {a:.2} dB, I_max = 1 rejected"
    ))
}

fn quantization_law() -> Outcome {
    let n = 20_000;
    let mant = CodecParams::mantissa(2.0, 1.0).with_bits(8);
    let mut rel = Vec::new();
    for w in 1..=10 {
        let data = (0..n)
            .map(|i| 2f64.powf((w - 1) as f64 + i as f64 / n as f64))
            .collect();
        let img = IrradianceImage::new(n, 1, 1, data).unwrap();
        let (s, truth) = encode(&img, &mant).unwrap();
        let out = reconstruct(&s, &truth).unwrap();
        rel.push(max_relative_error(&out, &img));
    }
    let mean = rel.iter().sum::<f64>() / rel.len() as f64;
    let bound = 2f64.powf(1.0 / 255.0) - 1.0;
    ensure!(
        rel.iter().all(|r| (r / mean - 1.0).abs() <= 0.05),
        "relative errors {rel:?}"
    );
    ensure!(
        rel.iter().all(|&r| r <= bound),
        "relative errors {rel:?} exceed {bound}"
    );

    let modulo = CodecParams::modulo(1.0).with_bits(8);
    for w in 0..=10u32 {
        let step = quantization_error_bounds(&modulo, w).unwrap().absolute_step;
        ensure!(
            (step - 1.0 / 255.0).abs() < 1e-15,
            "reported step {step} at W = {w}"
        );
        let data = (0..n).map(|i| w as f64 + i as f64 / n as f64).collect();
        let img = IrradianceImage::new(n, 1, 1, data).unwrap();
        let (s, truth) = encode(&img, &modulo).unwrap();
        let mut levels = reconstruct(&s, &truth).unwrap().data().to_vec();
        levels.dedup();
        for pair in levels.windows(2) {
            let d = pair[1] - pair[0];
            ensure!(
                (d - 1.0 / 255.0).abs() < 1e-12,
                "level spacing {d} at W = {w}"
            );
        }
    }
    Ok(format!(
        "mantissa max rel err {:.6}..{:.6} (bound {bound:.6}), modulo step 1/255",
        rel.iter().cloned().fold(f64::INFINITY, f64::min),
        rel.iter().cloned().fold(0.0, f64::max)
    ))
}

fn brute_min_cut(n: usize, edges: &[(usize, usize, f64)], s: usize, t: usize) -> f64 {
    (0u32..1 << n)
        .filter(|m| m & (1 << s) != 0 && m & (1 << t) == 0)
        .map(|m| {
            edges
                .iter()
                .filter(|(u, v, _)| m & (1 << u) != 0 && m & (1 << v) == 0)
                .map(|e| e.2)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

fn mrf_solver() -> Outcome {
    let cfg = MrfConfig::default();
    let mut correct = 0usize;
    let mut total = 0usize;
    for seed in 0..50 {
        let mut r = rng(7000 + seed);
        let p = both()[seed as usize % 2];
        let img = random_scene(&mut r, 32, 32, Shape::PiecewiseSmooth, &p, 0.45);
        ensure!(
            check_recoverable(&img, &p).unwrap().satisfied,
            "scene {seed} not recoverable"
        );
        let (s, truth) = encode(&img, &p).unwrap();
        let (w, rep) = wrapcam::unwrap::unwrap_mrf(&s, &cfg).map_err(|e| e.to_string())?;
        ensure!(
            rep.energy_trace.windows(2).all(|e| e[1] <= e[0]),
            "energy rose on scene {seed}: {:?}",
            rep.energy_trace
        );
        correct += w
            .data()
            .iter()
            .zip(truth.data())
            .filter(|(a, b)| a == b)
            .count();
        total += truth.len();
    }
    ensure!(correct == total, "winding accuracy {correct}/{total}");

    let mut r = rng(77);
    for g in 0..100 {
        let n = r.random_range(2..=8);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && r.random_bool(0.4) {
                    edges.push((u, v, r.random_range(0.0..10.0)));
                }
            }
        }
        let mut graph = FlowGraph::new(n);
        for &(u, v, c) in &edges {
            graph.add_edge(u, v, c, 0.0);
        }
        let flow = graph.max_flow(0, n - 1);
        let cut = brute_min_cut(n, &edges, 0, n - 1);
        ensure!(
            (flow - cut).abs() <= 1e-9 * (1.0 + cut),
            "graph {g}: flow {flow} vs cut {cut}"
        );
    }
    Ok(format!(
        "50 scenes, {correct}/{total} windings correct; 100 graphs match brute force"
    ))
}

fn noise_ordering() -> Outcome {
    let sigmas = [0.0, 0.005, 0.01, 0.02];
    let mut report = Vec::new();
    for base in both() {
        let mut mean = [0.0; 4];
        for seed in 0..20u64 {
            let mut r = rng(9000 + seed);
            let img = random_scene(&mut r, 64, 64, Shape::Smooth, &base, 0.3);
            for (k, &sigma) in sigmas.iter().enumerate() {
                let p = base.with_bits(8).with_noise(sigma, seed);
                let (s, _) = encode(&img, &p).unwrap();
                let (out, _) = decode(&s, &Solver::default()).unwrap();
                mean[k] += psnr(&out, &img, None).unwrap() / 20.0;
            }
        }
        ensure!(
            mean.windows(2).all(|m| m[1] < m[0]),
            "{:?}: mean PSNR {mean:?}",
            base.kind
        );
        report.push(format!(
            "{:?} {:.1}/{:.1}/{:.1}/{:.1} dB",
            base.kind, mean[0], mean[1], mean[2], mean[3]
        ));
    }
    Ok(report.join(", "))
}

/// Direct windowed SSIM: explicit 11×11 weights and two-pass moments.
fn oracle_ssim_terms(a: &[f64], b: &[f64], w: usize, h: usize) -> (f64, f64) {
    let mut kernel = [[0.0; 11]; 11];
    let mut total = 0.0;
    for (i, row) in kernel.iter_mut().enumerate() {
        for (j, k) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *k = (-(di * di + dj * dj) / 4.5).exp();
            total += *k;
        }
    }
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let (mut ssim_sum, mut cs_sum, mut n) = (0.0, 0.0, 0.0);
    for y in 0..=h - 11 {
        for x in 0..=w - 11 {
            let at = |img: &[f64], i: usize, j: usize| img[(y + i) * w + x + j];
            let (mut ma, mut mb) = (0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let k = kernel[i][j] / total;
                    ma += k * at(a, i, j);
                    mb += k * at(b, i, j);
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let k = kernel[i][j] / total;
                    let (da, db) = (at(a, i, j) - ma, at(b, i, j) - mb);
                    va += k * da * da;
                    vb += k * db * db;
                    cov += k * da * db;
                }
            }
            let cs = (2.0 * cov + c2) / (va + vb + c2);
            ssim_sum += (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1) * cs;
            cs_sum += cs;
            n += 1.0;
        }
    }
    (ssim_sum / n, cs_sum / n)
}

fn oracle_msssim(a: &[f64], b: &[f64], w: usize, h: usize) -> f64 {
    let weights = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
    let (mut a, mut b, mut w, mut h) = (a.to_vec(), b.to_vec(), w, h);
    let mut out = 1.0;
    for (k, wt) in weights.iter().enumerate() {
        let (s, cs) = oracle_ssim_terms(&a, &b, w, h);
        let term: f64 = if k == 4 { s } else { cs };
        out *= term.max(0.0).powf(*wt);
        let half = |img: &[f64]| {
            let mut v = Vec::new();
            for y in 0..h / 2 {
                for x in 0..w / 2 {
                    v.push(
                        (img[2 * y * w + 2 * x]
                            + img[2 * y * w + 2 * x + 1]
                            + img[(2 * y + 1) * w + 2 * x]
                            + img[(2 * y + 1) * w + 2 * x + 1])
                            / 4.0,
                    );
                }
            }
            v
        };
        a = half(&a);
        b = half(&b);
        w /= 2;
        h /= 2;
    }
    out
}

fn metrics_oracle() -> Outcome {
    let n = 176;
    let mut worst: f64 = 0.0;
    let mut r = rng(9);
    for _ in 0..10 {
        let a: Vec<f64> = (0..n * n).map(|_| r.random_range(0.0..1.0)).collect();
        let noise = r.random_range(0.02..0.5);
        let b: Vec<f64> = a
            .iter()
            .map(|v| (v + r.random_range(-noise..noise)).clamp(0.0, 1.0))
            .collect();
        let ia = IrradianceImage::new(n, n, 1, a.clone()).unwrap();
        let ib = IrradianceImage::new(n, n, 1, b.clone()).unwrap();
        let s = ssim(&ia, &ib).unwrap();
        let m = msssim(&ia, &ib).unwrap();
        worst = worst.max((s - oracle_ssim_terms(&a, &b, n, n).0).abs());
        worst = worst.max((m - oracle_msssim(&a, &b, n, n)).abs());
    }
    ensure!(worst <= 1e-6, "max deviation {worst:e}");

    let img = |v: Vec<f64>| IrradianceImage::new(10, 10, 1, v).unwrap();
    let zeros = img(vec![0.0; 100]);
    let mut one_off = vec![0.0; 100];
    one_off[37] = 1.0;
    let cases = [
        (psnr(&zeros, &zeros, Some(1.0)).unwrap(), f64::INFINITY),
        (psnr(&img(one_off), &zeros, Some(1.0)).unwrap(), 20.0),
        (psnr(&zeros, &img(vec![2.5; 100]), None).unwrap(), 0.0),
    ];
    for (got, want) in cases {
        ensure!(got == want, "psnr {got} != {want}");
    }
    Ok(format!(
        "10 pairs, max deviation {worst:.1e}; PSNR closed forms exact"
    ))
}

fn format_golden() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let read = |name: &str| read_hdr(fixtures.join(name)).map_err(|e| e.to_string());
    let cases: [(&str, Vec<f64>); 4] = [
        ("single_half.pfm", vec![0.5]),
        ("gray_2x2_be.pfm", vec![3.0, 0.125, 0.25, 1.5]),
        ("rgb_1x2_le.pfm", vec![4.0, 8.0, 0.0625, 0.5, 1.0, 2.0]),
        ("single_pixel.hdr", vec![1.0, 1.0, 1.0]),
    ];
    for (name, want) in cases {
        let got = read(name)?;
        ensure!(
            got.data()
                .iter()
                .map(|v| v.to_bits())
                .eq(want.iter().map(|v| v.to_bits())),
            "{name}: {:?}",
            got.data()
        );
    }
    let rle = read("rle_8x2.hdr")?;
    let mut want = Vec::new();
    for x in 0..8 {
        let b = if x < 4 { 1.0 } else { (x - 3) as f64 / 64.0 };
        want.extend([2.0, x as f64 * 0.5, b]);
    }
    for _ in 0..7 {
        want.extend([1.0, 0.5, 0.25]);
    }
    want.extend([0.0; 3]);
    ensure!(
        rle.data() == want.as_slice(),
        "rle_8x2.hdr: {:?}",
        rle.data()
    );

    let mut r = rng(10);
    for i in 0..100 {
        let (w, h) = (r.random_range(1..40), r.random_range(1..40));
        let c = if i % 2 == 0 { 1 } else { 3 };
        let data: Vec<f64> = (0..w * h * c)
            .map(|_| match r.random_range(0..4) {
                0 => 0.0,
                1 => f32::from_bits(r.random_range(1..0x0080_0000)) as f64,
                _ => f32::from_bits(r.random_range(0x0080_0000..0x7f80_0000)) as f64,
            })
            .collect();
        let img = Image::new(w, h, c, data).unwrap();
        let bytes = encode_pfm(&img);
        let back = decode_pfm(&bytes, Path::new("mem.pfm")).map_err(|e| e.to_string())?;
        ensure!(back == img, "image {i} changed in roundtrip");
        ensure!(
            encode_pfm(&back) == bytes,
            "image {i} re-encoded differently"
        );
    }
    Ok("5 fixtures bit-exact, 100 PFM roundtrips bit-identical".into())
}
