use log::warn;

use super::{DepthRaster, HeaderReader};
use crate::error::{Error, Result};

/// Parses a `Pf` (grayscale) or `PF` (RGB, first channel kept) float map.
///
/// A negative scale marks little-endian samples. Rows are stored
/// bottom-to-top on disk and returned top-down.
pub fn read_pfm(bytes: &[u8]) -> Result<DepthRaster> {
    let mut hdr = HeaderReader::new(bytes);
    let channels = match hdr.token()? {
        "Pf" => 1,
        "PF" => {
            warn!("3-channel PFM: using the first channel as depth");
            3
        }
        other => return Err(Error::Format(format!("bad PFM magic `{other}`"))),
    };
    let width: u32 = hdr.parse("width")?;
    let height: u32 = hdr.parse("height")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("zero PFM dimension {width}x{height}")));
    }
    let scale: f32 = hdr.parse("scale")?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Format(format!("bad PFM scale {scale}")));
    }
    let little = scale < 0.0;
    let payload = hdr.payload()?;

    let (w, h) = (width as usize, height as usize);
    let needed = w * h * channels * 4;
    if payload.len() < needed {
        return Err(Error::Format(format!(
            "truncated PFM payload: {} of {needed} bytes",
            payload.len()
        )));
    }
    let mut samples = vec![0f32; w * h];
    for (n, chunk) in payload[..needed].chunks_exact(4 * channels).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let value = if little { f32::from_le_bytes(raw) } else { f32::from_be_bytes(raw) };
        let (row_from_bottom, col) = (n / w, n % w);
        samples[(h - 1 - row_from_bottom) * w + col] = value;
    }
    Ok(DepthRaster { width, height, samples })
}

/// Canonical little-endian grayscale PFM.
pub fn write_pfm(raster: &DepthRaster) -> Vec<u8> {
    let (w, h) = (raster.width as usize, raster.height as usize);
    let mut out = format!("Pf\n{} {}\n-1.0\n", raster.width, raster.height).into_bytes();
    out.reserve(w * h * 4);
    for row in raster.samples.chunks_exact(w).rev().take(h) {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(values: &[f32]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn single_sample() {
        let mut bytes = b"Pf\n1 1\n-1.0\n".to_vec();
        bytes.extend(le(&[1000.0]));
        let r = read_pfm(&bytes).unwrap();
        assert_eq!((r.width, r.height), (1, 1));
        assert_eq!(r.samples, vec![1000.0]);
    }

    #[test]
    fn rows_are_flipped() {
        // on disk: bottom row (3, 4) first, then top row (1, 2)
        let mut golden = b"Pf\n2 2\n-1.0\n".to_vec();
        golden.extend(le(&[3.0, 4.0, 1.0, 2.0]));
        let r = read_pfm(&golden).unwrap();
        assert_eq!(r.samples, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(r.get(0, 0), 1.0);
        assert_eq!(r.get(1, 1), 4.0);
        assert_eq!(write_pfm(&r), golden);
    }

    #[test]
    fn big_endian_and_rgb() {
        let mut bytes = b"PF\n1 2\n1.0\n".to_vec();
        for v in [5.0f32, 0.0, 0.0, 7.0, 0.0, 0.0] {
            bytes.extend(v.to_be_bytes());
        }
        let r = read_pfm(&bytes).unwrap();
        assert_eq!(r.samples, vec![7.0, 5.0]);
    }

    #[test]
    fn non_finite_values_survive() {
        let r = DepthRaster::new(3, 1, vec![f32::INFINITY, f32::NAN, -2.0]).unwrap();
        let back = read_pfm(&write_pfm(&r)).unwrap();
        assert_eq!(back.samples[0], f32::INFINITY);
        assert!(back.samples[1].is_nan());
        assert_eq!(back.samples[2], -2.0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_pfm(b"P6\n1 1\n-1.0\n\0\0\0\0").is_err());
        assert!(read_pfm(b"Pf\n0 1\n-1.0\n").is_err());
        assert!(read_pfm(b"Pf\n2 2\n-1.0\n\0\0\0\0").is_err());
        assert!(read_pfm(b"Pf\n1 1\n").is_err());
        assert!(read_pfm(b"Pf\n1 1\n0.0\n\0\0\0\0").is_err());
    }
}
