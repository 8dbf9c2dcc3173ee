//! Directory layout of a light field on disk:
//! `array.json`, `cam_<t>_<s>.ppm`, `depth_<t>_<s>.pfm`.

use std::fs;
use std::path::{Path, PathBuf};

use super::{read_config, read_pfm, read_ppm, write_config, write_pfm, write_ppm};
use crate::binning::LightField;
use crate::error::{Error, Result};
use crate::lfgeom::CameraId;

pub const CONFIG_FILE: &str = "array.json";

pub fn view_file_names(cam: CameraId) -> (String, String) {
    (format!("cam_{}_{}.ppm", cam.t, cam.s), format!("depth_{}_{}.pfm", cam.t, cam.s))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

pub fn read_lightfield_dir(dir: &Path) -> Result<LightField> {
    let text = String::from_utf8(read_file(&dir.join(CONFIG_FILE))?)
        .map_err(|_| Error::Format(format!("{CONFIG_FILE} is not UTF-8")))?;
    let cfg = read_config(&text)?;
    let mut images = Vec::with_capacity(cfg.num_views());
    let mut depths = Vec::with_capacity(cfg.num_views());
    for cam in cfg.cameras() {
        let (img, dep) = view_file_names(cam);
        images.push(read_ppm(&read_file(&dir.join(img))?)?);
        depths.push(read_pfm(&read_file(&dir.join(dep))?)?);
    }
    LightField::new(cfg, images, depths)
}

/// Writes `lf` into `dir` (created if needed) and returns the written paths
/// in a fixed order.
pub fn write_lightfield_dir(lf: &LightField, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(1 + 2 * lf.cfg.num_views());
    let cfg_path = dir.join(CONFIG_FILE);
    fs::write(&cfg_path, write_config(&lf.cfg))?;
    written.push(cfg_path);
    for cam in lf.cfg.cameras() {
        let (img, dep) = lf.view(cam);
        let (img_name, dep_name) = view_file_names(cam);
        let p = dir.join(img_name);
        fs::write(&p, write_ppm(img, false))?;
        written.push(p);
        let p = dir.join(dep_name);
        fs::write(&p, write_pfm(dep))?;
        written.push(p);
    }
    Ok(written)
}
