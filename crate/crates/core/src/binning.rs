//! Ray-to-froxel assignment and ray-count histograms ("fristograms").

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lfgeom::{
    camera_center, disparity_constant, froxel_of_point_with, point_on_ray, CameraArrayConfig,
    CameraId, FroxelIndex,
};
use crate::lfio::{ColorRaster, DepthRaster, Rgb};

/// One captured ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaySample {
    pub cam: CameraId,
    /// `(i, j)`: column, row.
    pub pixel: (u32, u32),
    pub color: Rgb,
    pub z_mm: f32,
}

impl RaySample {
    /// Canonical order: camera row, camera column, pixel row, pixel column.
    pub fn key(&self) -> (u32, u32, u32, u32) {
        (self.cam.t, self.cam.s, self.pixel.1, self.pixel.0)
    }
}

/// `M` colour images plus `M` z-depth maps, views in row-major camera order.
#[derive(Clone, Debug, PartialEq)]
pub struct LightField {
    pub cfg: CameraArrayConfig,
    pub images: Vec<ColorRaster>,
    pub depths: Vec<DepthRaster>,
}

impl LightField {
    pub fn new(
        cfg: CameraArrayConfig,
        images: Vec<ColorRaster>,
        depths: Vec<DepthRaster>,
    ) -> Result<Self> {
        let lf = LightField { cfg, images, depths };
        lf.validate()?;
        Ok(lf)
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        let m = self.cfg.num_views();
        if self.images.len() != m || self.depths.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{} images and {} depth maps for {m} views",
                self.images.len(),
                self.depths.len()
            )));
        }
        let (w, h) = (self.cfg.width_px, self.cfg.height_px);
        for (n, (img, dep)) in self.images.iter().zip(&self.depths).enumerate() {
            if (img.width, img.height) != (w, h) || (dep.width, dep.height) != (w, h) {
                return Err(Error::DimensionMismatch(format!(
                    "view {n}: image {}x{}, depth {}x{}, expected {w}x{h}",
                    img.width, img.height, dep.width, dep.height
                )));
            }
        }
        Ok(())
    }

    pub fn view(&self, cam: CameraId) -> (&ColorRaster, &DepthRaster) {
        let n = cam.linear_index(&self.cfg);
        (&self.images[n], &self.depths[n])
    }

    pub fn total_rays(&self) -> u64 {
        self.cfg.num_views() as u64 * self.cfg.width_px as u64 * self.cfg.height_px as u64
    }
}

/// Froxel → ray population, plus ingestion counters.
#[derive(Clone, Debug, PartialEq)]
pub struct FroxelStore {
    pub cfg: CameraArrayConfig,
    froxels: HashMap<FroxelIndex, Vec<RaySample>>,
    pub assigned: u64,
    /// Rays whose depth was non-finite or non-positive.
    pub rejected: u64,
}

impl FroxelStore {
    pub fn new(cfg: CameraArrayConfig) -> Self {
        FroxelStore { cfg, froxels: HashMap::new(), assigned: 0, rejected: 0 }
    }

    pub fn len(&self) -> usize {
        self.froxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.froxels.is_empty()
    }

    pub fn get(&self, idx: &FroxelIndex) -> Option<&[RaySample]> {
        self.froxels.get(idx).map(Vec::as_slice)
    }

    /// Unordered iteration over non-empty froxels.
    pub fn iter(&self) -> impl Iterator<Item = (&FroxelIndex, &[RaySample])> {
        self.froxels.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Froxel indices sorted by `(k, v, u)`.
    pub fn sorted_keys(&self) -> Vec<FroxelIndex> {
        let mut keys: Vec<_> = self.froxels.keys().copied().collect();
        keys.sort_unstable_by_key(|f| (f.k, f.v, f.u));
        keys
    }

    /// Range of disparity slices holding at least one ray.
    pub fn slice_range(&self) -> Option<(u32, u32)> {
        let mut ks = self.froxels.keys().map(|f| f.k);
        let first = ks.next()?;
        Some(ks.fold((first, first), |(lo, hi), k| (lo.min(k), hi.max(k))))
    }

    fn push(&mut self, idx: FroxelIndex, sample: RaySample) {
        self.froxels.entry(idx).or_default().push(sample);
        self.assigned += 1;
    }

    #[cfg(test)]
    pub(crate) fn insert_for_test(&mut self, idx: FroxelIndex, samples: Vec<RaySample>) {
        for s in samples {
            self.push(idx, s);
        }
    }

    /// Folds a partial store built from a disjoint set of rays into `self`.
    pub fn merge(&mut self, other: FroxelStore) -> Result<()> {
        if other.cfg != self.cfg {
            return Err(Error::Config("cannot merge stores with different configurations".into()));
        }
        self.assigned += other.assigned;
        self.rejected += other.rejected;
        for (idx, mut samples) in other.froxels {
            self.froxels.entry(idx).or_default().append(&mut samples);
        }
        self.canonicalize();
        Ok(())
    }

    fn canonicalize(&mut self) {
        for samples in self.froxels.values_mut() {
            samples.sort_unstable_by_key(RaySample::key);
        }
    }
}

fn bin_view(lf: &LightField, cam: CameraId, c: f64) -> Result<FroxelStore> {
    let cfg = &lf.cfg;
    let center = camera_center(cfg, cam)?;
    let (img, dep) = lf.view(cam);
    let mut store = FroxelStore::new(cfg.clone());
    for j in 0..cfg.height_px {
        for i in 0..cfg.width_px {
            let z = dep.get(i, j);
            if !(z.is_finite() && z > 0.0) {
                store.rejected += 1;
                continue;
            }
            let pt = point_on_ray(cfg, center, i as f64, j as f64, z as f64);
            let idx = match froxel_of_point_with(cfg, c, pt) {
                Ok(idx) => idx,
                // too close to the array to index
                Err(Error::Domain(_)) => {
                    store.rejected += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let sample = RaySample { cam, pixel: (i, j), color: img.get(i, j), z_mm: z };
            store.push(idx, sample);
        }
    }
    Ok(store)
}

/// Assigns every ray of `lf` to its froxel. Views are binned in parallel on
/// the current rayon pool and merged; the result does not depend on
/// scheduling.
pub fn bin_lightfield(lf: &LightField) -> Result<FroxelStore> {
    lf.validate()?;
    let c = disparity_constant(&lf.cfg);
    let cams: Vec<CameraId> = lf.cfg.cameras().collect();
    let partials = cams
        .par_iter()
        .map(|&cam| bin_view(lf, cam, c))
        .collect::<Result<Vec<_>>>()?;
    let mut store = FroxelStore::new(lf.cfg.clone());
    for part in partials {
        store.assigned += part.assigned;
        store.rejected += part.rejected;
        for (idx, mut samples) in part.froxels {
            store.froxels.entry(idx).or_default().append(&mut samples);
        }
    }
    store.canonicalize();
    Ok(store)
}

/// Histogram of per-froxel ray counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Fristogram {
    /// ray count → number of froxels. Key 0 only present with `include_empty`.
    pub counts: BTreeMap<u32, u64>,
    pub total_rays: u64,
    pub nonempty_froxels: u64,
    pub include_empty: bool,
}

/// Builds the ray-count histogram. Empty froxels are counted over the
/// bounded frustum `[0, ceil(W/n_hor)) x [0, ceil(H/n_ver)) x [k_min, k_max]`
/// of observed slices, and only on request.
pub fn fristogram(store: &FroxelStore, include_empty: bool) -> Result<Fristogram> {
    let mut counts = BTreeMap::new();
    let mut total = 0u64;
    for (_, samples) in store.iter() {
        *counts.entry(samples.len() as u32).or_insert(0u64) += 1;
        total += samples.len() as u64;
    }
    let nonempty = store.len() as u64;
    if include_empty {
        let (k_min, k_max) = store.slice_range().ok_or_else(|| {
            Error::Unsupported("empty froxels need a bounded frustum, but no rays were binned".into())
        })?;
        let (gu, gv) = store.cfg.cell_grid();
        let cells = gu as u64 * gv as u64 * (k_max - k_min + 1) as u64;
        let inside = store
            .iter()
            .filter(|(f, _)| f.u >= 0 && f.v >= 0 && (f.u as u32) < gu && (f.v as u32) < gv)
            .count() as u64;
        counts.insert(0, cells - inside);
    }
    Ok(Fristogram { counts, total_rays: total, nonempty_froxels: nonempty, include_empty })
}

impl Fristogram {
    /// Cumulative fraction of non-empty froxels with at most `r` rays.
    pub fn cdf(&self) -> Result<Vec<(u32, f64)>> {
        if self.nonempty_froxels == 0 {
            return Err(Error::Empty("CDF of an empty store".into()));
        }
        let mut cum = 0u64;
        Ok(self
            .counts
            .iter()
            .filter(|(&r, _)| r > 0)
            .map(|(&r, &n)| {
                cum += n;
                (r, cum as f64 / self.nonempty_froxels as f64)
            })
            .collect())
    }

    /// Total rays over non-empty froxels; at most the number of views.
    pub fn reduction_factor(&self) -> Result<f64> {
        if self.nonempty_froxels == 0 {
            return Err(Error::Empty("reduction factor of an empty store".into()));
        }
        Ok(self.total_rays as f64 / self.nonempty_froxels as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ray_count,froxel_count\n");
        for (r, n) in &self.counts {
            writeln!(out, "{r},{n}").unwrap();
        }
        out
    }
}

pub fn cdf_to_csv(cdf: &[(u32, f64)]) -> String {
    let mut out = String::from("ray_count,cum_fraction\n");
    for (r, f) in cdf {
        writeln!(out, "{r},{f}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfgeom::slice_center_depth;

    fn flat_lf(n: u32, w: u32, h: u32, z: f32) -> LightField {
        let cfg = CameraArrayConfig::square(n, 10.0, 1.0, 0.01, w, h);
        let m = cfg.num_views();
        let images = (0..m).map(|v| ColorRaster::filled(w, h, [v as f32 / m as f32, 0.5, 0.5])).collect();
        let depths = (0..m).map(|_| DepthRaster::filled(w, h, z)).collect();
        LightField::new(cfg, images, depths).unwrap()
    }

    #[test]
    fn conservation_single_camera() {
        let lf = flat_lf(1, 2, 2, 500.0);
        let store = bin_lightfield(&lf).unwrap();
        assert_eq!((store.assigned, store.rejected), (4, 0));
        let total: usize = store.iter().map(|(_, s)| s.len()).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn reference_rig_ray_count() {
        let cfg = CameraArrayConfig::square(4, 70.0, 12.5, 0.00586, 1920, 1200);
        let lf = LightField { cfg, images: vec![], depths: vec![] };
        assert_eq!(lf.total_rays(), 36_864_000);
    }

    #[test]
    fn invalid_depths_are_rejected_and_counted() {
        let mut lf = flat_lf(1, 3, 1, 500.0);
        lf.depths[0].samples = vec![f32::INFINITY, f32::NAN, -1.0];
        let store = bin_lightfield(&lf).unwrap();
        assert_eq!((store.assigned, store.rejected), (0, 3));
        assert!(store.is_empty());
    }

    #[test]
    fn dimension_mismatch() {
        let mut lf = flat_lf(2, 4, 4, 500.0);
        lf.depths[3] = DepthRaster::filled(4, 3, 500.0);
        assert!(matches!(bin_lightfield(&lf), Err(Error::DimensionMismatch(_))));
        let mut lf = flat_lf(2, 4, 4, 500.0);
        lf.images.pop();
        assert!(matches!(bin_lightfield(&lf), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn plane_populations_match_geometric_oracle() {
        // 2x2 rig, fronto-parallel plane at the centre of slice 1 (disparity
        // 1.5 px). Camera (s, t) shifts reference x by (s - 0.5) * 1.5, so
        // reference cell u receives exactly one ray per camera whose shifted
        // footprint covers it.
        let (w, h) = (16u32, 16u32);
        let mut lf = flat_lf(2, w, h, 0.0);
        let c = disparity_constant(&lf.cfg);
        let z = slice_center_depth(c, 1) as f32;
        for d in &mut lf.depths {
            d.samples.fill(z);
        }
        let store = bin_lightfield(&lf).unwrap();
        let disparity = c / z as f64;
        let mut oracle: HashMap<(i64, i64), u32> = HashMap::new();
        for t in 0..2 {
            for s in 0..2 {
                let (ox, oy) = ((s as f64 - 0.5) * disparity, (t as f64 - 0.5) * disparity);
                for j in 0..h {
                    for i in 0..w {
                        let key = ((i as f64 + ox).floor() as i64, (j as f64 + oy).floor() as i64);
                        *oracle.entry(key).or_default() += 1;
                    }
                }
            }
        }
        assert_eq!(store.len(), oracle.len());
        for ((u, v), n) in &oracle {
            let got = store.get(&FroxelIndex::new(*u as i32, *v as i32, 1)).map_or(0, |s| s.len());
            assert_eq!(got as u32, *n, "froxel ({u}, {v})");
        }
        let interior = oracle.values().filter(|&&n| n == 4).count();
        assert!(interior >= 14 * 14);
        let fg = fristogram(&store, false).unwrap();
        assert_eq!(fg.counts.keys().max(), Some(&4));
        assert_eq!(fg.counts[&4] as usize, interior);
    }

    #[test]
    fn samples_are_canonically_ordered() {
        let lf = flat_lf(3, 8, 8, 700.0);
        let store = bin_lightfield(&lf).unwrap();
        for (_, samples) in store.iter() {
            assert!(samples.windows(2).all(|w| w[0].key() < w[1].key()));
        }
    }

    #[test]
    fn merge_of_shards_equals_full_binning() {
        let lf = flat_lf(2, 8, 6, 333.0);
        let full = bin_lightfield(&lf).unwrap();
        let c = disparity_constant(&lf.cfg);
        let mut cams: Vec<_> = lf.cfg.cameras().collect();
        cams.reverse();
        let mut merged = FroxelStore::new(lf.cfg.clone());
        for cam in cams {
            merged.merge(bin_view(&lf, cam, c).unwrap()).unwrap();
        }
        assert_eq!(merged, full);
        assert_eq!(bin_lightfield(&lf).unwrap(), full);
    }

    fn store_with(pops: &[(FroxelIndex, usize)]) -> FroxelStore {
        let cfg = CameraArrayConfig::square(4, 10.0, 1.0, 0.01, 4, 4);
        let mut store = FroxelStore::new(cfg);
        for &(idx, n) in pops {
            for p in 0..n {
                let s = RaySample { cam: CameraId::new(p as u32, 0), pixel: (0, 0), color: [0.0; 3], z_mm: 1.0 };
                store.push(idx, s);
            }
        }
        store
    }

    #[test]
    fn histogram_and_cdf_small() {
        let store = store_with(&[(FroxelIndex::new(0, 0, 1), 3), (FroxelIndex::new(1, 0, 1), 1)]);
        let fg = fristogram(&store, false).unwrap();
        assert_eq!(fg.counts, BTreeMap::from([(1, 1), (3, 1)]));
        assert_eq!(fg.total_rays, 4);
        assert_eq!(fg.cdf().unwrap(), vec![(1, 0.5), (3, 1.0)]);
        assert_eq!(fg.reduction_factor().unwrap(), 2.0);
        assert_eq!(fg.to_csv(), "ray_count,froxel_count\n1,1\n3,1\n");
        assert_eq!(cdf_to_csv(&fg.cdf().unwrap()), "ray_count,cum_fraction\n1,0.5\n3,1\n");
    }

    #[test]
    fn single_bin_cdf_and_unit_reduction() {
        let store = store_with(&[(FroxelIndex::new(0, 0, 1), 1), (FroxelIndex::new(5, 2, 3), 1)]);
        let fg = fristogram(&store, false).unwrap();
        assert_eq!(fg.cdf().unwrap(), vec![(1, 1.0)]);
        assert_eq!(fg.reduction_factor().unwrap(), 1.0);
    }

    #[test]
    fn empty_froxels_over_bounded_frustum() {
        // 4x4 cells, slices 1..=2 -> 32 cells; two in-box froxels, one outside
        let store = store_with(&[
            (FroxelIndex::new(0, 0, 1), 2),
            (FroxelIndex::new(3, 3, 2), 1),
            (FroxelIndex::new(-1, 0, 2), 1),
        ]);
        let fg = fristogram(&store, true).unwrap();
        assert_eq!(fg.counts[&0], 30);
        assert_eq!(fg.cdf().unwrap().last().unwrap().1, 1.0);
        let empty = FroxelStore::new(store.cfg.clone());
        assert!(matches!(fristogram(&empty, true), Err(Error::Unsupported(_))));
        let fg = fristogram(&empty, false).unwrap();
        assert!(fg.cdf().is_err());
        assert!(fg.reduction_factor().is_err());
    }

    #[test]
    fn reference_reduction_factor_arithmetic() {
        let fg = Fristogram {
            counts: BTreeMap::new(),
            total_rays: 36_864_000,
            nonempty_froxels: 3_185_991,
            include_empty: false,
        };
        let r = fg.reduction_factor().unwrap();
        assert!((r - 11.57).abs() < 0.005, "{r}");
    }
}
