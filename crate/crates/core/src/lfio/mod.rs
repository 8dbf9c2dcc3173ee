//! File I/O: PFM depth maps, PPM/PGM rasters, array configuration and the
//! on-disk light-field directory layout.
//!
//! All rasters are stored top-down in memory. Formats that store rows
//! bottom-up (PFM) are flipped here and nowhere else.

mod config;
mod layout;
mod pfm;
mod ppm;

pub use config::{read_config, write_config};
pub use layout::{read_lightfield_dir, write_lightfield_dir, view_file_names};
pub use pfm::{read_pfm, write_pfm};
pub use ppm::{read_ppm, write_pgm_mask, write_ppm};

use crate::error::{Error, Result};

pub type Rgb = [f32; 3];

/// Per-pixel z-depth in millimetres. Non-finite or non-positive samples mark
/// pixels without geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthRaster {
    pub width: u32,
    pub height: u32,
    pub samples: Vec<f32>,
}

impl DepthRaster {
    pub fn new(width: u32, height: u32, samples: Vec<f32>) -> Result<Self> {
        check_dims(width, height, samples.len())?;
        Ok(DepthRaster { width, height, samples })
    }

    pub fn filled(width: u32, height: u32, value: f32) -> Self {
        DepthRaster { width, height, samples: vec![value; width as usize * height as usize] }
    }

    #[inline]
    pub fn get(&self, i: u32, j: u32) -> f32 {
        self.samples[j as usize * self.width as usize + i as usize]
    }
}

/// RGB raster with channel values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorRaster {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<Rgb>,
}

impl ColorRaster {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        if let Some(bad) = pixels.iter().flatten().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::Domain(format!("color value {bad} outside [0, 1]")));
        }
        Ok(ColorRaster { width, height, pixels })
    }

    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        ColorRaster { width, height, pixels: vec![color; width as usize * height as usize] }
    }

    #[inline]
    pub fn get(&self, i: u32, j: u32) -> Rgb {
        self.pixels[j as usize * self.width as usize + i as usize]
    }

    #[inline]
    pub fn set(&mut self, i: u32, j: u32, c: Rgb) {
        let w = self.width as usize;
        self.pixels[j as usize * w + i as usize] = c;
    }
}

fn check_dims(width: u32, height: u32, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("zero raster dimension {width}x{height}")));
    }
    if len != width as usize * height as usize {
        return Err(Error::DimensionMismatch(format!(
            "{len} samples for a {width}x{height} raster"
        )));
    }
    Ok(())
}

/// Minimal cursor over a netpbm-style ASCII header.
pub(crate) struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        HeaderReader { bytes, pos: 0 }
    }

    /// Next whitespace-delimited token, skipping `#` comments.
    pub(crate) fn token(&mut self) -> Result<&'a str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format("truncated header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::Format("non-ASCII header".into()))
    }

    pub(crate) fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.token()?;
        tok.parse().map_err(|_| Error::Format(format!("bad {what} `{tok}`")))
    }

    /// Consumes the single whitespace byte that terminates the header and
    /// returns the remaining payload.
    pub(crate) fn payload(self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(Error::Format("missing separator before payload".into())),
        }
    }
}
