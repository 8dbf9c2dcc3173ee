//! Deterministic synthetic light fields with exact depth.
//!
//! Scenes are stacks of fronto-parallel rectangles rendered by a planar
//! camera array. A plane flagged `specular` carries a Ramp texture whose
//! ramp channel varies with the camera instead of with position, giving
//! froxels with known view-dependent colour.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{Lambertian, LambertianLabel};
use crate::binning::LightField;
use crate::error::{Error, Result};
use crate::lfgeom::{
    camera_center, disparity_constant, froxel_of_point_with, point_on_ray, slice_center_depth,
    CameraArrayConfig, CameraId, FroxelIndex, PlanePoint, WorldPoint,
};
use crate::lfio::{ColorRaster, DepthRaster, Rgb};

/// Axis-aligned rectangle on a plane, in world millimetres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extent {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Extent {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x < self.x_max && y >= self.y_min && y < self.y_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Texture {
    Solid { color: Rgb },
    /// Squares of `cell_px` reference-camera pixels, measured at the plane's depth.
    Checker { c1: Rgb, c2: Rgb, cell_px: u32 },
    /// `base` plus `amplitude` times a ramp on `channel`. The ramp runs
    /// across the reference image for matte planes and across the camera
    /// index for specular ones.
    Ramp { channel: usize, amplitude: f32, base: Rgb },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneSpec {
    pub z_mm: f64,
    /// `None` for an unbounded plane.
    #[serde(default)]
    pub extent: Option<Extent>,
    pub texture: Texture,
    #[serde(default)]
    pub specular: bool,
}

/// Matte backdrop hit by every ray that misses all planes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub color: Rgb,
    pub z_mm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub planes: Vec<PlaneSpec>,
    /// Without a background, misses get infinite depth.
    #[serde(default)]
    pub background: Option<Background>,
    #[serde(default)]
    pub seed: u64,
}

/// Which surface a pixel ray hits first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Surface {
    Plane(usize),
    Background,
}

fn valid_color(c: &Rgb) -> bool {
    c.iter().all(|v| (0.0..=1.0).contains(v))
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        for (n, p) in self.planes.iter().enumerate() {
            let bad = |msg: &str| Err(Error::Config(format!("plane {n}: {msg}")));
            if !(p.z_mm.is_finite() && p.z_mm > 0.0) {
                return bad("depth must be positive and finite");
            }
            if let Some(e) = p.extent {
                if !(e.x_min < e.x_max && e.y_min < e.y_max) {
                    return bad("empty extent");
                }
            }
            match p.texture {
                Texture::Solid { color } if !valid_color(&color) => return bad("color outside [0, 1]"),
                Texture::Checker { c1, c2, cell_px } => {
                    if !valid_color(&c1) || !valid_color(&c2) {
                        return bad("color outside [0, 1]");
                    }
                    if cell_px == 0 {
                        return bad("checker cell must be at least one pixel");
                    }
                }
                Texture::Ramp { channel, amplitude, base } => {
                    if channel > 2 {
                        return bad("ramp channel must be 0, 1 or 2");
                    }
                    if !(0.0..=1.0).contains(&amplitude) {
                        return bad("ramp amplitude outside [0, 1]");
                    }
                    if !valid_color(&base) {
                        return bad("color outside [0, 1]");
                    }
                }
                _ => {}
            }
            if p.specular && !matches!(p.texture, Texture::Ramp { .. }) {
                return bad("specular planes need a Ramp texture");
            }
        }
        if let Some(bg) = self.background {
            if !valid_color(&bg.color) || !(bg.z_mm.is_finite() && bg.z_mm > 0.0) {
                return Err(Error::Config("invalid background".into()));
            }
        }
        Ok(())
    }

    /// Nearest surface along the ray of pixel `(i, j)` from `center`, with its depth.
    pub fn trace(
        &self,
        cfg: &CameraArrayConfig,
        center: PlanePoint,
        i: f64,
        j: f64,
    ) -> Option<(Surface, f64)> {
        let mut best: Option<(Surface, f64)> = None;
        for (n, p) in self.planes.iter().enumerate() {
            if best.is_some_and(|(_, z)| z <= p.z_mm) {
                continue;
            }
            let hit = point_on_ray(cfg, center, i, j, p.z_mm);
            if p.extent.is_none_or(|e| e.contains(hit.x_mm, hit.y_mm)) {
                best = Some((Surface::Plane(n), p.z_mm));
            }
        }
        best.or_else(|| self.background.map(|bg| (Surface::Background, bg.z_mm)))
    }

    fn shade(&self, cfg: &CameraArrayConfig, surface: Surface, hit: WorldPoint, view: usize) -> Rgb {
        let plane = match surface {
            Surface::Background => return self.background.expect("background hit").color,
            Surface::Plane(n) => &self.planes[n],
        };
        let (cx, cy) = cfg.principal_point();
        let x_ref = cfg.focal_px() * hit.x_mm / hit.z_mm + cx;
        let y_ref = cfg.focal_px() * hit.y_mm / hit.z_mm + cy;
        match plane.texture {
            Texture::Solid { color } => color,
            Texture::Checker { c1, c2, cell_px } => {
                let cell = cell_px as f64;
                let parity = (x_ref / cell).floor() as i64 + (y_ref / cell).floor() as i64;
                if parity.rem_euclid(2) == 0 { c1 } else { c2 }
            }
            Texture::Ramp { channel, amplitude, base } => {
                let m = cfg.num_views();
                let t = if plane.specular {
                    if m > 1 { view as f64 / (m - 1) as f64 } else { 0.0 }
                } else {
                    (x_ref / (cfg.width_px as f64 - 1.0).max(1.0)).clamp(0.0, 1.0)
                };
                let mut c = base;
                c[channel] = (base[channel] as f64 + amplitude as f64 * t).min(1.0) as f32;
                c
            }
        }
    }
}

/// Renders every view of `spec` through the array.
pub fn render(spec: &SceneSpec, cfg: &CameraArrayConfig) -> Result<LightField> {
    spec.validate()?;
    cfg.validate()?;
    let cams: Vec<CameraId> = cfg.cameras().collect();
    let views: Vec<(ColorRaster, DepthRaster)> = cams
        .par_iter()
        .map(|&cam| render_view(spec, cfg, cam))
        .collect::<Result<_>>()?;
    let (images, depths) = views.into_iter().unzip();
    LightField::new(cfg.clone(), images, depths)
}

fn render_view(
    spec: &SceneSpec,
    cfg: &CameraArrayConfig,
    cam: CameraId,
) -> Result<(ColorRaster, DepthRaster)> {
    let center = camera_center(cfg, cam)?;
    let view = cam.linear_index(cfg);
    let (w, h) = (cfg.width_px, cfg.height_px);
    let mut img = ColorRaster::filled(w, h, [0.0; 3]);
    let mut dep = DepthRaster::filled(w, h, f32::INFINITY);
    for j in 0..h {
        for i in 0..w {
            let Some((surface, z)) = spec.trace(cfg, center, i as f64, j as f64) else {
                continue;
            };
            let hit = point_on_ray(cfg, center, i as f64, j as f64, z);
            img.set(i, j, spec.shade(cfg, surface, hit, view));
            dep.samples[(j * w + i) as usize] = z as f32;
        }
    }
    Ok((img, dep))
}

/// Labels every froxel reached by a camera ray by whether most of its rays
/// come from a specular plane.
pub fn ground_truth_labels(
    spec: &SceneSpec,
    cfg: &CameraArrayConfig,
) -> Result<HashMap<FroxelIndex, LambertianLabel>> {
    spec.validate()?;
    cfg.validate()?;
    let c = disparity_constant(cfg);
    // froxel -> rays per surface (planes first, background last)
    let mut tally: HashMap<FroxelIndex, Vec<u32>> = HashMap::new();
    let slots = spec.planes.len() + 1;
    for cam in cfg.cameras() {
        let center = camera_center(cfg, cam)?;
        for j in 0..cfg.height_px {
            for i in 0..cfg.width_px {
                let Some((surface, z)) = spec.trace(cfg, center, i as f64, j as f64) else {
                    continue;
                };
                // depth as stored in the rendered raster
                let z = z as f32 as f64;
                let pt = point_on_ray(cfg, center, i as f64, j as f64, z);
                let idx = froxel_of_point_with(cfg, c, pt)?;
                let slot = match surface {
                    Surface::Plane(n) => n,
                    Surface::Background => slots - 1,
                };
                tally.entry(idx).or_insert_with(|| vec![0; slots])[slot] += 1;
            }
        }
    }
    Ok(tally
        .into_iter()
        .map(|(idx, counts)| {
            let dominant = (0..slots).rev().max_by_key(|&s| counts[s]).unwrap();
            let specular = dominant < spec.planes.len() && spec.planes[dominant].specular;
            let label = if specular { Lambertian::NonLambertian } else { Lambertian::Lambertian };
            (idx, LambertianLabel { label, score: f64::NAN })
        })
        .collect())
}

fn random_color(rng: &mut ChaCha8Rng) -> Rgb {
    [rng.random(), rng.random(), rng.random()]
}

/// A random stack of one to three planes between 0.4 and 6 pixels of
/// disparity, optionally over a far backdrop.
pub fn random_scene(cfg: &CameraArrayConfig, seed: u64) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = disparity_constant(cfg);
    let (fw, fh) = {
        let z = c;
        let f = cfg.focal_px();
        (cfg.width_px as f64 * z / f, cfg.height_px as f64 * z / f)
    };
    let n = rng.random_range(1..=3);
    let planes = (0..n)
        .map(|_| {
            let disparity = rng.random_range(0.4..6.0);
            let z_mm = c / disparity;
            let scale = z_mm / c;
            let extent = rng.random_bool(0.6).then(|| {
                let (cx, cy) = (rng.random_range(-0.3..0.3) * fw * scale, rng.random_range(-0.3..0.3) * fh * scale);
                let (hw, hh) = (rng.random_range(0.1..0.6) * fw * scale, rng.random_range(0.1..0.6) * fh * scale);
                Extent { x_min: cx - hw, x_max: cx + hw, y_min: cy - hh, y_max: cy + hh }
            });
            let specular = rng.random_bool(0.3);
            let texture = if specular || rng.random_bool(0.3) {
                let mut base = random_color(&mut rng);
                let channel = rng.random_range(0..3);
                let amplitude = rng.random_range(0.0..0.5);
                base[channel] *= 1.0 - amplitude;
                Texture::Ramp { channel, amplitude, base }
            } else if rng.random_bool(0.5) {
                Texture::Checker {
                    c1: random_color(&mut rng),
                    c2: random_color(&mut rng),
                    cell_px: rng.random_range(1..6),
                }
            } else {
                Texture::Solid { color: random_color(&mut rng) }
            };
            PlaneSpec { z_mm, extent, texture, specular }
        })
        .collect();
    let background = rng
        .random_bool(0.5)
        .then(|| Background { color: random_color(&mut rng), z_mm: c * rng.random_range(0.5..3.0) });
    SceneSpec { planes, background, seed }
}

/// Depth at the centre of disparity slice `k`, handy for placing planes
/// where binning and synthesis agree exactly.
pub fn slice_plane_depth(cfg: &CameraArrayConfig, k: u32) -> f64 {
    slice_center_depth(disparity_constant(cfg), k)
}
