use crate::error::Result;
use crate::lfgeom::CameraArrayConfig;

/// Parses and validates a JSON array configuration. Every field is required
/// and unknown keys are rejected.
pub fn read_config(text: &str) -> Result<CameraArrayConfig> {
    let cfg: CameraArrayConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn write_config(cfg: &CameraArrayConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("config serializes");
    s.push('\n');
    s
}
