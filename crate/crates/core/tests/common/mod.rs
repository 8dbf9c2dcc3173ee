#![allow(dead_code)]

use fristogram::lfgeom::CameraArrayConfig;
use fristogram::lfio::Rgb;
use fristogram::scenegen::{slice_plane_depth, Extent, PlaneSpec, SceneSpec, Texture};

/// 4x4 rig with C = f/p * b = 1000 mm, 64x64 views.
pub fn desk_rig() -> CameraArrayConfig {
    CameraArrayConfig::square(4, 10.0, 1.0, 0.01, 64, 64)
}

pub const CHECK_A: Rgb = [0.2, 0.3, 0.7];
pub const CHECK_B: Rgb = [0.8, 0.6, 0.25];

/// One unbounded checkerboard at the centre of slice 1.
pub fn checker_plane(cfg: &CameraArrayConfig) -> SceneSpec {
    SceneSpec {
        planes: vec![PlaneSpec {
            z_mm: slice_plane_depth(cfg, 1),
            extent: None,
            texture: Texture::Checker { c1: CHECK_A, c2: CHECK_B, cell_px: 4 },
            specular: false,
        }],
        background: None,
        seed: 0,
    }
}

/// World-space rectangle covering reference-image columns/rows
/// `[lo, hi)` (in pixel coordinates) at depth `z`.
pub fn ref_rect(cfg: &CameraArrayConfig, z: f64, lo: f64, hi: f64) -> Extent {
    let (cx, cy) = cfg.principal_point();
    let s = z / cfg.focal_px();
    Extent { x_min: (lo - cx) * s, x_max: (hi - cx) * s, y_min: (lo - cy) * s, y_max: (hi - cy) * s }
}
