//! Camera-array geometry and the world to froxel mapping.
//!
//! The rig is a planar `rows x cols` grid of identical pinhole cameras with
//! parallel optical axes. World coordinates are millimetres in a frame
//! centred on the array, axes aligned with the camera axes, `z` along the
//! optical axis. Froxels are anchored on a virtual reference camera placed at
//! the array centre:
//!
//! * `u`, `v` are pixel cells of the reference camera, scaled by
//!   `n_hor` / `n_ver`, and may be negative or exceed the image size for
//!   points only seen by off-centre cameras;
//! * `k` is the integer disparity slice, `k = floor(C / z)` with the
//!   disparity constant `C = f_d * B_eff / p`. Slice `k` covers depths
//!   `(C / (k + 1), C / k]`, slice 0 everything beyond `C`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which baseline enters the depth-per-disparity relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum BaselineMode {
    /// One pixel of disparity between neighbouring cameras.
    #[default]
    #[serde(rename = "neighbor")]
    Neighbor,
    /// One pixel of disparity across the whole array, `b * (N - 1)`.
    #[serde(rename = "full", alias = "full_array")]
    FullArray,
}

impl std::str::FromStr for BaselineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neighbor" => Ok(BaselineMode::Neighbor),
            "full" | "full_array" => Ok(BaselineMode::FullArray),
            other => Err(Error::Config(format!("unknown baseline mode `{other}`"))),
        }
    }
}

/// Geometry of a planar camera array plus the froxel scaling factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraArrayConfig {
    pub rows: u32,
    pub cols: u32,
    /// Neighbour-to-neighbour spacing, identical horizontally and vertically.
    pub baseline_mm: f64,
    pub focal_mm: f64,
    /// Edge length of a (square) sensor pixel.
    pub pixel_pitch_mm: f64,
    pub width_px: u32,
    pub height_px: u32,
    pub n_hor: u32,
    pub n_ver: u32,
    pub baseline_mode: BaselineMode,
}

impl CameraArrayConfig {
    /// A square `n x n` array with single-pixel froxels in neighbour mode.
    pub fn square(
        n: u32,
        baseline_mm: f64,
        focal_mm: f64,
        pixel_pitch_mm: f64,
        width_px: u32,
        height_px: u32,
    ) -> Self {
        CameraArrayConfig {
            rows: n,
            cols: n,
            baseline_mm,
            focal_mm,
            pixel_pitch_mm,
            width_px,
            height_px,
            n_hor: 1,
            n_ver: 1,
            baseline_mode: BaselineMode::Neighbor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("baseline_mm", self.baseline_mm)?;
        positive("focal_mm", self.focal_mm)?;
        positive("pixel_pitch_mm", self.pixel_pitch_mm)?;
        for (name, v) in [
            ("rows", self.rows),
            ("cols", self.cols),
            ("width_px", self.width_px),
            ("height_px", self.height_px),
            ("n_hor", self.n_hor),
            ("n_ver", self.n_ver),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.baseline_mode == BaselineMode::FullArray {
            if self.rows != self.cols {
                return Err(Error::Config(format!(
                    "full-array baseline needs a square array, got {}x{}",
                    self.rows, self.cols
                )));
            }
            if self.rows < 2 {
                return Err(Error::Config(
                    "full-array baseline needs at least two cameras per side".into(),
                ));
            }
        }
        Ok(())
    }

    /// Number of views `M = rows * cols`.
    pub fn num_views(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    pub fn effective_baseline(&self) -> f64 {
        match self.baseline_mode {
            BaselineMode::Neighbor => self.baseline_mm,
            BaselineMode::FullArray => self.baseline_mm * (self.rows as f64 - 1.0),
        }
    }

    /// Principal point, pixel centres sitting on integer coordinates.
    pub fn principal_point(&self) -> (f64, f64) {
        (
            (self.width_px as f64 - 1.0) / 2.0,
            (self.height_px as f64 - 1.0) / 2.0,
        )
    }

    /// Focal length in pixel units, `f_d / p`.
    pub fn focal_px(&self) -> f64 {
        self.focal_mm / self.pixel_pitch_mm
    }

    /// Iterates cameras in canonical order (row `t` major, then column `s`).
    pub fn cameras(&self) -> impl Iterator<Item = CameraId> + '_ {
        (0..self.rows).flat_map(move |t| (0..self.cols).map(move |s| CameraId { s, t }))
    }

    /// Bounding box of in-frustum cells: `ceil(W / n_hor) x ceil(H / n_ver)`.
    pub fn cell_grid(&self) -> (u32, u32) {
        (
            self.width_px.div_ceil(self.n_hor),
            self.height_px.div_ceil(self.n_ver),
        )
    }
}

/// One sub-aperture view: column `s`, row `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CameraId {
    pub s: u32,
    pub t: u32,
}

impl CameraId {
    pub fn new(s: u32, t: u32) -> Self {
        CameraId { s, t }
    }

    /// Row-major view index `t * cols + s`.
    pub fn linear_index(self, cfg: &CameraArrayConfig) -> usize {
        self.t as usize * cfg.cols as usize + self.s as usize
    }

    pub fn check(self, cfg: &CameraArrayConfig) -> Result<()> {
        if self.s < cfg.cols && self.t < cfg.rows {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!(
                "camera ({}, {}) outside a {}x{} array",
                self.s, self.t, cfg.cols, cfg.rows
            )))
        }
    }
}

/// A point on the array plane (`z = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    pub x_mm: f64,
    pub y_mm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldPoint {
    pub x_mm: f64,
    pub y_mm: f64,
    pub z_mm: f64,
}

impl WorldPoint {
    pub fn new(x_mm: f64, y_mm: f64, z_mm: f64) -> Result<Self> {
        check_depth(z_mm)?;
        Ok(WorldPoint { x_mm, y_mm, z_mm })
    }
}

/// Integer froxel coordinate. Larger `k` is nearer to the array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FroxelIndex {
    pub u: i32,
    pub v: i32,
    pub k: u32,
}

impl FroxelIndex {
    pub fn new(u: i32, v: i32, k: u32) -> Self {
        FroxelIndex { u, v, k }
    }
}

fn check_depth(z_mm: f64) -> Result<()> {
    if z_mm.is_finite() && z_mm > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("depth must be positive and finite, got {z_mm}")))
    }
}

/// Froxel cross-section `(width, height)` in mm at distance `d_plane_mm`.
pub fn froxel_width_height(cfg: &CameraArrayConfig, d_plane_mm: f64) -> Result<(f64, f64)> {
    check_depth(d_plane_mm)?;
    let scale = cfg.pixel_pitch_mm * d_plane_mm / cfg.focal_mm;
    Ok((cfg.n_hor as f64 * scale, cfg.n_ver as f64 * scale))
}

/// Depth covered by one pixel of disparity at distance `d_plane_mm`.
///
/// Returns [`Error::InfiniteDepth`] once the distance reaches the disparity
/// constant, where the froxel no longer closes.
pub fn froxel_depth(cfg: &CameraArrayConfig, d_plane_mm: f64) -> Result<f64> {
    check_depth(d_plane_mm)?;
    let c = disparity_constant(cfg);
    if d_plane_mm >= c {
        return Err(Error::InfiniteDepth { depth_mm: d_plane_mm, limit_mm: c });
    }
    Ok(d_plane_mm * d_plane_mm / (c - d_plane_mm))
}

/// `C = f_d * B_eff / p`: the depth at which disparity is exactly one pixel.
pub fn disparity_constant(cfg: &CameraArrayConfig) -> f64 {
    cfg.focal_mm * cfg.effective_baseline() / cfg.pixel_pitch_mm
}

pub fn slice_of_depth(cfg: &CameraArrayConfig, z_mm: f64) -> Result<u32> {
    slice_for_constant(disparity_constant(cfg), z_mm)
}

/// `floor(C / z)`, rejecting depths so small that the slice overflows `u32`.
pub fn slice_for_constant(c: f64, z_mm: f64) -> Result<u32> {
    check_depth(z_mm)?;
    let k = (c / z_mm).floor();
    if k > u32::MAX as f64 {
        return Err(Error::Domain(format!("depth {z_mm} mm is too close to the array")));
    }
    Ok(k as u32)
}

/// Representative depth of slice `k`, `C / (k + 0.5)`; always maps back to `k`.
pub fn slice_center_depth(c: f64, k: u32) -> f64 {
    c / (k as f64 + 0.5)
}

pub fn camera_center(cfg: &CameraArrayConfig, cam: CameraId) -> Result<PlanePoint> {
    cam.check(cfg)?;
    Ok(PlanePoint {
        x_mm: (cam.s as f64 - (cfg.cols as f64 - 1.0) / 2.0) * cfg.baseline_mm,
        y_mm: (cam.t as f64 - (cfg.rows as f64 - 1.0) / 2.0) * cfg.baseline_mm,
    })
}

/// World point at depth `z_mm` on the ray through pixel `(i, j)` of `cam`.
pub fn unproject(
    cfg: &CameraArrayConfig,
    cam: CameraId,
    pixel: (u32, u32),
    z_mm: f64,
) -> Result<WorldPoint> {
    let (i, j) = pixel;
    if i >= cfg.width_px || j >= cfg.height_px {
        return Err(Error::OutOfRange(format!(
            "pixel ({i}, {j}) outside {}x{}",
            cfg.width_px, cfg.height_px
        )));
    }
    check_depth(z_mm)?;
    let center = camera_center(cfg, cam)?;
    Ok(point_on_ray(cfg, center, i as f64, j as f64, z_mm))
}

/// Unchecked pinhole back-projection from an arbitrary centre on the plane.
pub(crate) fn point_on_ray(
    cfg: &CameraArrayConfig,
    center: PlanePoint,
    i: f64,
    j: f64,
    z_mm: f64,
) -> WorldPoint {
    let (cx, cy) = cfg.principal_point();
    let scale = z_mm / cfg.focal_px();
    WorldPoint {
        x_mm: (i - cx) * scale + center.x_mm,
        y_mm: (j - cy) * scale + center.y_mm,
        z_mm,
    }
}

/// Floor that treats values within rounding noise of an integer as that
/// integer, so pixel centres that land exactly on a cell edge stay put.
fn snapped_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

pub fn froxel_of_point(cfg: &CameraArrayConfig, pt: WorldPoint) -> Result<FroxelIndex> {
    froxel_of_point_with(cfg, disparity_constant(cfg), pt)
}

pub(crate) fn froxel_of_point_with(
    cfg: &CameraArrayConfig,
    c: f64,
    pt: WorldPoint,
) -> Result<FroxelIndex> {
    let k = slice_for_constant(c, pt.z_mm)?;
    let (cx, cy) = cfg.principal_point();
    let f = cfg.focal_px();
    let x_ref = f * pt.x_mm / pt.z_mm + cx;
    let y_ref = f * pt.y_mm / pt.z_mm + cy;
    let u = snapped_floor(snapped_floor(x_ref) / cfg.n_hor as f64);
    let v = snapped_floor(snapped_floor(y_ref) / cfg.n_ver as f64);
    if !(u.abs() < i32::MAX as f64 && v.abs() < i32::MAX as f64) {
        return Err(Error::Domain(format!(
            "point ({}, {}, {}) projects outside the representable froxel grid",
            pt.x_mm, pt.y_mm, pt.z_mm
        )));
    }
    Ok(FroxelIndex { u: u as i32, v: v as i32, k })
}
