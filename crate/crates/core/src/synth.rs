//! Occlusion-aware view synthesis from a reduced field.
//!
//! Each target pixel marches its ray through the occupied disparity slices
//! from nearest (largest `k`) to farthest, sampling at the slice's
//! representative depth `C / (k + 0.5)`. The first occupied froxel wins;
//! pixels that find none are holes.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::ReducedField;
use crate::lfgeom::{
    camera_center, disparity_constant, froxel_of_point_with, point_on_ray, slice_center_depth,
    CameraId, FroxelIndex, PlanePoint,
};
use crate::lfio::{ColorRaster, Rgb};

pub const HOLE_MAGENTA: Rgb = [1.0, 0.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViewRequest {
    /// Target camera centre on the array plane.
    pub position: PlanePoint,
    pub hole_color: Rgb,
}

impl ViewRequest {
    pub fn at(x_mm: f64, y_mm: f64) -> Self {
        ViewRequest { position: PlanePoint { x_mm, y_mm }, hole_color: HOLE_MAGENTA }
    }

    /// Request at the position of an existing camera of the field's array.
    pub fn at_camera(rf: &ReducedField, cam: CameraId) -> Result<Self> {
        let p = camera_center(&rf.cfg, cam)?;
        Ok(Self::at(p.x_mm, p.y_mm))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesizedView {
    pub image: ColorRaster,
    /// Row-major, `true` where no froxel was found.
    pub holes: Vec<bool>,
}

impl SynthesizedView {
    pub fn hole_count(&self) -> usize {
        self.holes.iter().filter(|&&h| h).count()
    }
}

pub fn synthesize(rf: &ReducedField, req: &ViewRequest) -> Result<SynthesizedView> {
    if rf.is_empty() {
        return Err(Error::Empty("cannot synthesize from an empty reduced field".into()));
    }
    let pos = req.position;
    if !(pos.x_mm.is_finite() && pos.y_mm.is_finite()) {
        return Err(Error::Domain(format!("non-finite view position ({}, {})", pos.x_mm, pos.y_mm)));
    }
    let cfg = &rf.cfg;
    let c = disparity_constant(cfg);
    let lookup: HashMap<FroxelIndex, Rgb> =
        rf.froxels.values().map(|r| (r.index, r.color)).collect();
    let mut slices: Vec<u32> = rf.froxels.keys().map(|f| f.k).collect();
    slices.sort_unstable_by(|a, b| b.cmp(a));
    slices.dedup();
    let depths: Vec<(u32, f64)> = slices.iter().map(|&k| (k, slice_center_depth(c, k))).collect();

    let (w, h) = (cfg.width_px, cfg.height_px);
    let rows: Vec<Vec<Option<Rgb>>> = (0..h)
        .into_par_iter()
        .map(|j| {
            (0..w)
                .map(|i| {
                    depths.iter().find_map(|&(k, z)| {
                        let pt = point_on_ray(cfg, pos, i as f64, j as f64, z);
                        let idx = froxel_of_point_with(cfg, c, pt).ok()?;
                        lookup.get(&FroxelIndex { k, ..idx }).copied()
                    })
                })
                .collect()
        })
        .collect();

    let mut image = ColorRaster::filled(w, h, req.hole_color);
    let mut holes = vec![true; w as usize * h as usize];
    for (j, row) in rows.into_iter().enumerate() {
        for (i, px) in row.into_iter().enumerate() {
            if let Some(color) = px {
                image.set(i as u32, j as u32, color);
                holes[j * w as usize + i] = false;
            }
        }
    }
    Ok(SynthesizedView { image, holes })
}
