//! Full-reference image quality: PSNR and single-scale SSIM.
//!
//! SSIM runs on BT.601 luma with an 11x11 Gaussian window (sigma 1.5),
//! `K1 = 0.01`, `K2 = 0.03`, dynamic range 1, averaged over all window
//! positions that fit inside the image.

use crate::error::{Error, Result};
use crate::lfio::ColorRaster;

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
pub const C1: f64 = K1 * K1;
pub const C2: f64 = K2 * K2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityReport {
    /// `f64::INFINITY` for identical images.
    pub psnr_db: f64,
    pub ssim: f64,
}

impl std::fmt::Display for QualityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.psnr_db.is_infinite() {
            write!(f, "psnr_db=inf ssim={:.6}", self.ssim)
        } else {
            write!(f, "psnr_db={:.4} ssim={:.6}", self.psnr_db, self.ssim)
        }
    }
}

fn same_dims(a: &ColorRaster, b: &ColorRaster) -> Result<()> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(())
}

pub fn mse(a: &ColorRaster, b: &ColorRaster) -> Result<f64> {
    same_dims(a, b)?;
    let sum: f64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .flat_map(|(p, q)| (0..3).map(move |c| (p[c] as f64 - q[c] as f64).powi(2)))
        .sum();
    Ok(sum / (a.pixels.len() * 3) as f64)
}

pub fn psnr(a: &ColorRaster, b: &ColorRaster) -> Result<f64> {
    let e = mse(a, b)?;
    Ok(if e == 0.0 { f64::INFINITY } else { 10.0 * (1.0 / e).log10() })
}

fn luma(img: &ColorRaster) -> Vec<f64> {
    img.pixels
        .iter()
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect()
}

fn gaussian_kernel() -> [f64; WINDOW] {
    let half = (WINDOW / 2) as f64;
    let mut k = [0f64; WINDOW];
    for (n, v) in k.iter_mut().enumerate() {
        let d = n as f64 - half;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.map(|v| v / sum)
}

/// Separable "valid" Gaussian filtering of a `w x h` plane.
fn blur_valid(src: &[f64], w: usize, h: usize, kernel: &[f64; WINDOW]) -> Vec<f64> {
    let (ow, oh) = (w - WINDOW + 1, h - WINDOW + 1);
    let mut horiz = vec![0f64; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = kernel.iter().zip(&row[x..x + WINDOW]).map(|(k, v)| k * v).sum();
        }
    }
    let mut out = vec![0f64; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..WINDOW).map(|n| kernel[n] * horiz[(y + n) * ow + x]).sum();
        }
    }
    out
}

pub fn ssim(a: &ColorRaster, b: &ColorRaster) -> Result<f64> {
    same_dims(a, b)?;
    let (w, h) = (a.width as usize, a.height as usize);
    if w < WINDOW || h < WINDOW {
        return Err(Error::DimensionMismatch(format!(
            "{w}x{h} image is smaller than the {WINDOW}x{WINDOW} SSIM window"
        )));
    }
    let (x, y) = (luma(a), luma(b));
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
    let kernel = gaussian_kernel();
    let [mx, my, sxx, syy, sxy] = [&x, &y, &xx, &yy, &xy].map(|p| blur_valid(p, w, h, &kernel));

    let n = mx.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = sxx[i] - ux * ux;
            let vy = syy[i] - uy * uy;
            let cov = sxy[i] - ux * uy;
            ((2.0 * ux * uy + C1) * (2.0 * cov + C2)) / ((ux * ux + uy * uy + C1) * (vx + vy + C2))
        })
        .sum();
    Ok(total / n as f64)
}

pub fn quality(reference: &ColorRaster, test: &ColorRaster) -> Result<QualityReport> {
    Ok(QualityReport { psnr_db: psnr(reference, test)?, ssim: ssim(reference, test)? })
}
