use serde::{Deserialize, Serialize};

use super::edges::WrapEdgeMask;
use crate::codec::SensorImage;
use crate::error::{Error, Result};
use crate::image::{Image, WindingMap};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloodFillReport {
    /// 4-neighbor boundaries whose final label difference disagrees with the mask.
    pub conflicts: usize,
    /// Largest shift applied to lift a component's labels back to a minimum of 0.
    pub negative_offset: u32,
    pub components: usize,
}

/// Neighbor of sample `(x, y)` together with the winding step taken to reach it.
fn neighbors(
    edges: &WrapEdgeMask,
    x: usize,
    y: usize,
    c: usize,
) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
    let (w, h, _) = edges.dims();
    let left = (x > 0).then(|| ((x - 1, y), -(edges.horizontal(x - 1, y, c) as i64)));
    let right = (x + 1 < w).then(|| ((x + 1, y), edges.horizontal(x, y, c) as i64));
    let up = (y > 0).then(|| ((x, y - 1), -(edges.vertical(x, y - 1, c) as i64)));
    let down = (y + 1 < h).then(|| ((x, y + 1), edges.vertical(x, y, c) as i64));
    [left, right, up, down].into_iter().flatten()
}

/// Region-growing winding recovery from a wrap-edge mask.
///
/// Each channel is grown breadth-first from its darkest sample (ties broken by
/// `seed_key`). Samples are labeled one BFS layer at a time; a sample's label
/// is the majority proposal from its neighbors in the previous layer (ties go
/// to the smaller label), so the result does not depend on neighbor visiting
/// order. Labels are finally shifted so the smallest winding is 0.
///
/// When the darkest samples are mirror images `(x, y)` and `(y, x)`, both are
/// tried and the labeling with fewer conflicts wins (further ties by a
/// transposition-invariant summary), which keeps decoding equivariant under
/// transposition.
pub fn unwrap_floodfill(
    sensor: &SensorImage,
    edges: &WrapEdgeMask,
) -> Result<(WindingMap, FloodFillReport)> {
    let img = sensor.image();
    let (w, h, channels) = img.dims();
    if edges.dims() != img.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            found: edges.dims(),
        });
    }

    let mut report = FloodFillReport::default();
    let mut out = vec![0u32; w * h * channels];
    let npx = w * h;

    for c in 0..channels {
        let value = |p: usize| img.data()[p * channels + c];
        let seed = (0..npx)
            .min_by(|&a, &b| {
                value(a)
                    .total_cmp(&value(b))
                    .then_with(|| seed_key(a, w).cmp(&seed_key(b, w)))
            })
            .expect("images are never empty");
        let (sx, sy) = (seed % w, seed / w);
        let mut seeds = vec![seed];
        if sx != sy && sx < h && sy < w {
            let mirror = sx * w + sy;
            if value(mirror) == value(seed) {
                seeds.push(mirror);
            }
        }

        let (labels, offset) = if seeds.len() == 1 {
            grow(edges, c, seed)
        } else {
            seeds
                .into_iter()
                .map(|s| grow(edges, c, s))
                .map(|(labels, offset)| (score(&labels, edges, c), labels, offset))
                .min_by(|a, b| a.0.cmp(&b.0))
                .map(|(_, labels, offset)| (labels, offset))
                .expect("at least one seed")
        };
        report.components += 1;
        report.negative_offset = report.negative_offset.max(offset);
        for (p, &v) in labels.iter().enumerate() {
            if v > u32::MAX as i64 {
                return Err(Error::WindingOverflow {
                    value: v as u64,
                    limit: u32::MAX as u64,
                });
            }
            out[p * channels + c] = v as u32;
        }
    }

    let winding = Image::new(w, h, channels, out)?;
    report.conflicts = count_conflicts(&winding, edges);
    Ok((winding, report))
}

/// Layered BFS over one channel. Returns labels shifted to a minimum of 0 and
/// the size of that shift.
fn grow(edges: &WrapEdgeMask, c: usize, seed: usize) -> (Vec<i64>, u32) {
    let (w, h, _) = edges.dims();
    let npx = w * h;
    let mut label = vec![0i64; npx];
    // 0 = unvisited, otherwise BFS layer + 1
    let mut layer = vec![0u32; npx];
    let mut queued = vec![false; npx];
    layer[seed] = 1;
    queued[seed] = true;
    let mut frontier = vec![seed];
    let mut depth = 1;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &p in &frontier {
            for ((nx, ny), _) in neighbors(edges, p % w, p / w, c) {
                let q = ny * w + nx;
                if !queued[q] {
                    queued[q] = true;
                    next.push(q);
                }
            }
        }
        for &q in &next {
            let mut proposals = [0i64; 4];
            let mut n = 0;
            for ((nx, ny), step_back) in neighbors(edges, q % w, q / w, c) {
                let p = ny * w + nx;
                if layer[p] == depth {
                    proposals[n] = label[p] - step_back;
                    n += 1;
                }
            }
            label[q] = majority(&mut proposals[..n]);
        }
        depth += 1;
        for &q in &next {
            layer[q] = depth;
        }
        frontier = next;
    }
    let min = label.iter().copied().min().unwrap_or(0);
    for v in label.iter_mut() {
        *v -= min;
    }
    (label, (-min).max(0) as u32)
}

/// Ranking of candidate labelings that is unchanged by transposing both the
/// labeling and the mask.
fn score(label: &[i64], edges: &WrapEdgeMask, c: usize) -> (usize, i64, Vec<(usize, usize, i64)>) {
    let (w, h, _) = edges.dims();
    let mut conflicts = 0;
    for y in 0..h {
        for x in 0..w {
            let here = label[y * w + x];
            if x + 1 < w && label[y * w + x + 1] - here != edges.horizontal(x, y, c) as i64 {
                conflicts += 1;
            }
            if y + 1 < h && label[(y + 1) * w + x] - here != edges.vertical(x, y, c) as i64 {
                conflicts += 1;
            }
        }
    }
    let mut summary: Vec<_> = label
        .iter()
        .enumerate()
        .map(|(p, &v)| {
            let (x, y) = (p % w, p / w);
            (x + y, x.abs_diff(y), v)
        })
        .collect();
    summary.sort_unstable();
    (conflicts, label.iter().sum(), summary)
}

/// Tie-break among equally dark samples. Anti-diagonal first, then distance
/// from the main diagonal, so the choice commutes with transposition; only
/// mirror-image ties fall through to row-major order.
fn seed_key(p: usize, w: usize) -> (usize, usize, usize) {
    let (x, y) = (p % w, p / w);
    (x + y, x.abs_diff(y), p)
}

fn majority(proposals: &mut [i64]) -> i64 {
    proposals.sort_unstable();
    let mut best = proposals[0];
    let mut best_run = 0;
    let mut i = 0;
    while i < proposals.len() {
        let mut j = i;
        while j < proposals.len() && proposals[j] == proposals[i] {
            j += 1;
        }
        if j - i > best_run {
            best_run = j - i;
            best = proposals[i];
        }
        i = j;
    }
    best
}

/// Boundaries whose winding difference is not the one the mask asks for.
pub fn count_conflicts(winding: &WindingMap, edges: &WrapEdgeMask) -> usize {
    let (w, h, c) = winding.dims();
    let mut conflicts = 0;
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let here = winding.get(x, y, ch) as i64;
                if x + 1 < w
                    && winding.get(x + 1, y, ch) as i64 - here != edges.horizontal(x, y, ch) as i64
                {
                    conflicts += 1;
                }
                if y + 1 < h
                    && winding.get(x, y + 1, ch) as i64 - here != edges.vertical(x, y, ch) as i64
                {
                    conflicts += 1;
                }
            }
        }
    }
    conflicts
}
