use super::{ColorRaster, HeaderReader};
use crate::error::{Error, Result};

/// Reads a binary `P6` image with maxval 255 or 65535 (16-bit samples are
/// big-endian).
pub fn read_ppm(bytes: &[u8]) -> Result<ColorRaster> {
    let mut hdr = HeaderReader::new(bytes);
    let magic = hdr.token()?;
    if magic != "P6" {
        return Err(Error::Format(format!("bad PPM magic `{magic}`")));
    }
    let width: u32 = hdr.parse("width")?;
    let height: u32 = hdr.parse("height")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("zero PPM dimension {width}x{height}")));
    }
    let maxval: u32 = hdr.parse("maxval")?;
    let wide = match maxval {
        255 => false,
        65535 => true,
        other => return Err(Error::Format(format!("unsupported PPM maxval {other}"))),
    };
    let payload = hdr.payload()?;
    let n = width as usize * height as usize * 3;
    let needed = if wide { 2 * n } else { n };
    if payload.len() < needed {
        return Err(Error::Format(format!(
            "truncated PPM payload: {} of {needed} bytes",
            payload.len()
        )));
    }
    let values: Vec<f32> = if wide {
        payload[..needed]
            .chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]) as f32 / 65535.0)
            .collect()
    } else {
        payload[..needed].iter().map(|&b| b as f32 / 255.0).collect()
    };
    let pixels = values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(ColorRaster { width, height, pixels })
}

fn quantize(v: f32, max: f32) -> u32 {
    (v.clamp(0.0, 1.0) as f64 * max as f64 + 0.5).floor() as u32
}

/// Writes an 8-bit (`maxval` 255) or 16-bit (`maxval` 65535) binary `P6`.
/// Values are rounded half-up.
pub fn write_ppm(raster: &ColorRaster, sixteen_bit: bool) -> Vec<u8> {
    let maxval = if sixteen_bit { 65535 } else { 255 };
    let mut out = format!("P6\n{} {}\n{maxval}\n", raster.width, raster.height).into_bytes();
    for px in &raster.pixels {
        for &c in px {
            let q = quantize(c, maxval as f32);
            if sixteen_bit {
                out.extend_from_slice(&(q as u16).to_be_bytes());
            } else {
                out.push(q as u8);
            }
        }
    }
    out
}

/// Binary `P5` mask with maxval 1: 0 where `hole[n]` is set, 1 elsewhere.
pub fn write_pgm_mask(width: u32, height: u32, hole: &[bool]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n1\n").into_bytes();
    out.extend(hole.iter().map(|&h| if h { 0u8 } else { 1u8 }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn magenta_pixel() {
        let r = read_ppm(b"P6\n1 1\n255\n\xff\x00\xff").unwrap();
        assert_eq!(r.pixels, vec![[1.0, 0.0, 1.0]]);
    }

    #[test]
    fn sixteen_bit_is_big_endian() {
        let golden = b"P6\n2 1\n65535\n\xff\xff\x00\x00\x80\x00\x00\x01\x12\x34\xff\xff";
        let r = read_ppm(golden).unwrap();
        assert_eq!(r.pixels[0], [1.0, 0.0, 0x8000 as f32 / 65535.0]);
        assert_eq!(r.pixels[1], [1.0 / 65535.0, 0x1234 as f32 / 65535.0, 1.0]);
        assert_eq!(write_ppm(&r, true), golden.to_vec());
    }

    #[test]
    fn header_comments_allowed() {
        let r = read_ppm(b"P6\n# made by hand\n1 1\n255\n\x00\x80\xff").unwrap();
        assert_eq!(r.pixels[0][1], 128.0 / 255.0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_ppm(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(read_ppm(b"P6\n2 2\n255\n\x00\x00\x00").is_err());
        assert!(read_ppm(b"P6\n1 1\n100\n\x00\x00\x00").is_err());
        assert!(read_ppm(b"P6\n1 1").is_err());
    }

    #[test]
    fn half_up_rounding() {
        let r = ColorRaster::new(1, 1, vec![[0.5 / 255.0, 1.0, 0.0]]).unwrap();
        let bytes = write_ppm(&r, false);
        assert_eq!(&bytes[bytes.len() - 3..], &[1, 255, 0]);
    }

    #[test]
    fn mask_encoding() {
        assert_eq!(write_pgm_mask(3, 1, &[true, false, true]), b"P5\n3 1\n1\n\x00\x01\x00".to_vec());
    }

    proptest! {
        #[test]
        fn eight_bit_files_round_trip(w in 1u32..6, h in 1u32..6, seed in any::<u64>()) {
            let n = (w * h * 3) as usize;
            let payload: Vec<u8> = (0..n).map(|i| (seed.rotate_left(i as u32 % 64) as u8) ^ i as u8).collect();
            let mut file = format!("P6\n{w} {h}\n255\n").into_bytes();
            file.extend(&payload);
            let r = read_ppm(&file).unwrap();
            prop_assert_eq!(write_ppm(&r, false), file);
        }
    }
}
