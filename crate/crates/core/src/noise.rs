//! Additive Gaussian and salt-and-pepper noise on light-field images.
//! Depth maps are never touched.
//!
//! Each view draws from its own ChaCha8 stream seeded with
//! `seed ^ view_index`, so output does not depend on how views are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::binning::LightField;
use crate::error::{Error, Result};
use crate::lfio::ColorRaster;

/// Name of the generator, recorded in run manifests.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), per-view seed = seed ^ view_index";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseKind {
    Gaussian { mean: f64, variance: f64 },
    /// Fraction of pixels turned fully black or fully white.
    SaltPepper { density: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseParams {
    pub fn gaussian(mean: f64, variance: f64, seed: u64) -> Self {
        NoiseParams { kind: NoiseKind::Gaussian { mean, variance }, seed }
    }

    pub fn salt_pepper(density: f64, seed: u64) -> Self {
        NoiseParams { kind: NoiseKind::SaltPepper { density }, seed }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::Gaussian { mean, variance } => {
                if !mean.is_finite() || !(variance.is_finite() && variance >= 0.0) {
                    return Err(Error::Domain(format!(
                        "gaussian noise needs finite mean and variance >= 0, got {mean}, {variance}"
                    )));
                }
            }
            NoiseKind::SaltPepper { density } => {
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::Domain(format!("noise density {density} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

pub fn view_rng(seed: u64, view: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ view as u64)
}

fn gaussian_view(img: &ColorRaster, normal: Normal<f64>, mut rng: ChaCha8Rng) -> ColorRaster {
    let pixels = img
        .pixels
        .iter()
        .map(|px| px.map(|c| (c as f64 + normal.sample(&mut rng)).clamp(0.0, 1.0) as f32))
        .collect();
    ColorRaster { width: img.width, height: img.height, pixels }
}

fn salt_pepper_view(img: &ColorRaster, density: f64, mut rng: ChaCha8Rng) -> ColorRaster {
    let pixels = img
        .pixels
        .iter()
        .map(|px| {
            // always draw both values so the stream layout is density-independent
            let hit = rng.random::<f64>() < density;
            let white = rng.random::<bool>();
            match (hit, white) {
                (false, _) => *px,
                (true, true) => [1.0; 3],
                (true, false) => [0.0; 3],
            }
        })
        .collect();
    ColorRaster { width: img.width, height: img.height, pixels }
}

/// Adds independent per-pixel, per-channel Gaussian noise and clamps to `[0, 1]`.
pub fn add_gaussian(lf: &LightField, params: &NoiseParams) -> Result<LightField> {
    params.validate()?;
    let NoiseKind::Gaussian { mean, variance } = params.kind else {
        return Err(Error::Domain("add_gaussian needs gaussian parameters".into()));
    };
    let normal = Normal::new(mean, variance.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
    let images = lf
        .images
        .par_iter()
        .enumerate()
        .map(|(v, img)| gaussian_view(img, normal, view_rng(params.seed, v)))
        .collect();
    Ok(LightField { cfg: lf.cfg.clone(), images, depths: lf.depths.clone() })
}

/// Replaces each pixel with probability `density` by black or white, all
/// three channels together (dead-pixel model).
pub fn add_salt_pepper(lf: &LightField, params: &NoiseParams) -> Result<LightField> {
    params.validate()?;
    let NoiseKind::SaltPepper { density } = params.kind else {
        return Err(Error::Domain("add_salt_pepper needs salt-and-pepper parameters".into()));
    };
    let images = lf
        .images
        .par_iter()
        .enumerate()
        .map(|(v, img)| salt_pepper_view(img, density, view_rng(params.seed, v)))
        .collect();
    Ok(LightField { cfg: lf.cfg.clone(), images, depths: lf.depths.clone() })
}

pub fn add_noise(lf: &LightField, params: &NoiseParams) -> Result<LightField> {
    match params.kind {
        NoiseKind::Gaussian { .. } => add_gaussian(lf, params),
        NoiseKind::SaltPepper { .. } => add_salt_pepper(lf, params),
    }
}
