//! Per-froxel colour statistics and Lambertian classification.

use std::fmt::Write as _;

use crate::binning::{FroxelStore, RaySample};
use crate::error::{Error, Result};
use crate::lfgeom::{CameraArrayConfig, FroxelIndex};
use crate::lfio::{ColorRaster, Rgb};

pub const DEFAULT_TAU: f64 = 0.02;
pub const DEFAULT_PATCH_MAGNIFY: u32 = 8;

/// Cells of cameras with no ray in the froxel alternate between these.
const ABSENT_CHECKER: [Rgb; 2] = [[0.25, 0.25, 0.25], [0.75, 0.75, 0.75]];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FroxelColorStats {
    pub n: usize,
    pub mean: [f64; 3],
    /// Population standard deviation per channel.
    pub std: [f64; 3],
    /// Largest Euclidean RGB distance between any two rays.
    pub max_pairwise_dist: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lambertian {
    Lambertian,
    NonLambertian,
}

impl Lambertian {
    pub fn as_str(self) -> &'static str {
        match self {
            Lambertian::Lambertian => "lambertian",
            Lambertian::NonLambertian => "non_lambertian",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambertianLabel {
    pub label: Lambertian,
    /// Mean of the per-channel standard deviations.
    pub score: f64,
}

pub fn color_stats(samples: &[RaySample]) -> Result<FroxelColorStats> {
    if samples.is_empty() {
        return Err(Error::Empty("colour statistics of an empty froxel".into()));
    }
    let n = samples.len() as f64;
    let mut mean = [0f64; 3];
    for s in samples {
        for (acc, x) in mean.iter_mut().zip(s.color) {
            *acc += x as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0f64; 3];
    for s in samples {
        for c in 0..3 {
            let d = s.color[c] as f64 - mean[c];
            var[c] += d * d;
        }
    }
    let std = var.map(|v| (v / n).sqrt());

    let mut max_sq = 0f64;
    for (a, sa) in samples.iter().enumerate() {
        for sb in &samples[a + 1..] {
            let d2: f64 = (0..3)
                .map(|c| {
                    let d = sa.color[c] as f64 - sb.color[c] as f64;
                    d * d
                })
                .sum();
            max_sq = max_sq.max(d2);
        }
    }
    Ok(FroxelColorStats { n: samples.len(), mean, std, max_pairwise_dist: max_sq.sqrt() })
}

pub fn classify_lambertian(stats: &FroxelColorStats, tau: f64) -> LambertianLabel {
    let score = stats.std.iter().sum::<f64>() / 3.0;
    let label = if score <= tau { Lambertian::Lambertian } else { Lambertian::NonLambertian };
    LambertianLabel { label, score }
}

/// Lays a froxel's rays out on the camera grid: a `g x g` tile of cells
/// (`g = ceil(sqrt(M))`), camera `(s, t)` at row-major slot `t * cols + s`,
/// each cell `magnify` pixels wide. Several rays from one camera are
/// averaged; cameras without a ray show a grey checker.
pub fn export_froxel_patch(
    samples: &[RaySample],
    cfg: &CameraArrayConfig,
    magnify: u32,
) -> Result<ColorRaster> {
    if samples.is_empty() {
        return Err(Error::Empty("patch of an empty froxel".into()));
    }
    if magnify == 0 {
        return Err(Error::Domain("patch magnification must be at least 1".into()));
    }
    let m = cfg.num_views();
    let g = (1..).find(|g: &usize| g * g >= m).unwrap();
    let mut sums = vec![([0f64; 3], 0u32); m];
    for s in samples {
        let slot = &mut sums[s.cam.linear_index(cfg)];
        for c in 0..3 {
            slot.0[c] += s.color[c] as f64;
        }
        slot.1 += 1;
    }
    let side = g as u32 * magnify;
    let mut tile = ColorRaster::filled(side, side, ABSENT_CHECKER[0]);
    for y in 0..side {
        for x in 0..side {
            let slot = (y / magnify) as usize * g + (x / magnify) as usize;
            let color = match sums.get(slot) {
                Some(&(sum, n)) if n > 0 => sum.map(|v| (v / n as f64) as f32),
                _ => ABSENT_CHECKER[((x + y) % 2) as usize],
            };
            tile.set(x, y, color);
        }
    }
    Ok(tile)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FroxelReport {
    pub index: FroxelIndex,
    pub stats: FroxelColorStats,
    pub label: LambertianLabel,
}

/// Statistics and labels for every non-empty froxel, sorted by `(k, v, u)`.
pub fn analyze_store(store: &FroxelStore, tau: f64) -> Vec<FroxelReport> {
    store
        .sorted_keys()
        .into_iter()
        .map(|index| {
            let stats = color_stats(store.get(&index).unwrap()).expect("stored froxels are non-empty");
            FroxelReport { index, stats, label: classify_lambertian(&stats, tau) }
        })
        .collect()
}

pub fn reports_to_csv(reports: &[FroxelReport]) -> String {
    let mut out = String::from("u,v,k,n,mean_r,mean_g,mean_b,std_r,std_g,std_b,label\n");
    for r in reports {
        let (m, s) = (r.stats.mean, r.stats.std);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.index.u, r.index.v, r.index.k, r.stats.n, m[0], m[1], m[2], s[0], s[1], s[2],
            r.label.label.as_str()
        )
        .unwrap();
    }
    out
}
