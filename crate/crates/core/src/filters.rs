//! Froxel-domain mean/median filtering and reduction to one ray per froxel.
//!
//! Filters only ever combine rays of the same froxel, so edges and texture
//! between froxels are untouched.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::binning::{FroxelStore, RaySample};
use crate::error::{Error, Result};
use crate::lfgeom::{CameraArrayConfig, FroxelIndex};
use crate::lfio::Rgb;

pub const FRXL_MAGIC: &[u8; 5] = b"FRXL1";
const RECORD_LEN: usize = 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FroxelStat {
    Mean,
    Median,
}

impl std::str::FromStr for FroxelStat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(FroxelStat::Mean),
            "median" => Ok(FroxelStat::Median),
            other => Err(Error::Config(format!("unknown filter `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedFroxel {
    pub index: FroxelIndex,
    pub color: Rgb,
    pub n_source_rays: u32,
}

/// One representative ray per non-empty froxel.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedField {
    pub cfg: CameraArrayConfig,
    pub froxels: BTreeMap<FroxelIndex, ReducedFroxel>,
}

pub fn froxel_mean(samples: &[RaySample]) -> Result<Rgb> {
    if samples.is_empty() {
        return Err(Error::Empty("mean of an empty froxel".into()));
    }
    let mut sum = [0f64; 3];
    for s in samples {
        for (acc, x) in sum.iter_mut().zip(s.color) {
            *acc += x as f64;
        }
    }
    Ok(sum.map(|v| (v / samples.len() as f64) as f32))
}

/// Per-channel median; for even counts the lower of the two middle values.
pub fn froxel_median(samples: &[RaySample]) -> Result<Rgb> {
    if samples.is_empty() {
        return Err(Error::Empty("median of an empty froxel".into()));
    }
    let mid = (samples.len() - 1) / 2;
    let mut out = [0f32; 3];
    let mut channel: Vec<f32> = Vec::with_capacity(samples.len());
    for (c, slot) in out.iter_mut().enumerate() {
        channel.clear();
        channel.extend(samples.iter().map(|s| s.color[c]));
        channel.sort_unstable_by(f32::total_cmp);
        *slot = channel[mid];
    }
    Ok(out)
}

pub fn reduce(store: &FroxelStore, stat: FroxelStat) -> ReducedField {
    let keys = store.sorted_keys();
    let reduced: Vec<ReducedFroxel> = keys
        .par_iter()
        .map(|idx| {
            let samples = store.get(idx).expect("key from store");
            let color = match stat {
                FroxelStat::Mean => froxel_mean(samples),
                FroxelStat::Median => froxel_median(samples),
            }
            .expect("stored froxels are non-empty");
            ReducedFroxel { index: *idx, color, n_source_rays: samples.len() as u32 }
        })
        .collect();
    ReducedField {
        cfg: store.cfg.clone(),
        froxels: reduced.into_iter().map(|r| (r.index, r)).collect(),
    }
}

impl ReducedField {
    pub fn len(&self) -> usize {
        self.froxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.froxels.is_empty()
    }

    pub fn get(&self, idx: &FroxelIndex) -> Option<&ReducedFroxel> {
        self.froxels.get(idx)
    }

    /// Serializes as `FRXL1`, a little-endian `u32` byte length, the config
    /// as compact JSON, then 28-byte records sorted by `(k desc, v, u)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let json = serde_json::to_vec(&self.cfg).expect("config serializes");
        let mut out = Vec::with_capacity(9 + json.len() + RECORD_LEN * self.len());
        out.extend_from_slice(FRXL_MAGIC);
        out.extend_from_slice(&(json.len() as u32).to_le_bytes());
        out.extend_from_slice(&json);
        let mut records: Vec<&ReducedFroxel> = self.froxels.values().collect();
        records.sort_unstable_by_key(|r| (std::cmp::Reverse(r.index.k), r.index.v, r.index.u));
        for r in records {
            out.extend_from_slice(&r.index.u.to_le_bytes());
            out.extend_from_slice(&r.index.v.to_le_bytes());
            out.extend_from_slice(&r.index.k.to_le_bytes());
            for c in r.color {
                out.extend_from_slice(&c.to_le_bytes());
            }
            out.extend_from_slice(&r.n_source_rays.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let rest = bytes
            .strip_prefix(FRXL_MAGIC.as_slice())
            .ok_or_else(|| Error::Format("missing FRXL1 magic".into()))?;
        if rest.len() < 4 {
            return Err(Error::Format("truncated FRXL1 header".into()));
        }
        let json_len = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
        let rest = &rest[4..];
        if rest.len() < json_len {
            return Err(Error::Format("truncated FRXL1 config block".into()));
        }
        let cfg: CameraArrayConfig = serde_json::from_slice(&rest[..json_len])?;
        cfg.validate()?;
        let body = &rest[json_len..];
        if body.len() % RECORD_LEN != 0 {
            return Err(Error::Format(format!(
                "FRXL1 body of {} bytes is not a whole number of records",
                body.len()
            )));
        }
        let mut froxels = BTreeMap::new();
        for rec in body.chunks_exact(RECORD_LEN) {
            let word = |n: usize| -> [u8; 4] { rec[4 * n..4 * n + 4].try_into().unwrap() };
            let index = FroxelIndex {
                u: i32::from_le_bytes(word(0)),
                v: i32::from_le_bytes(word(1)),
                k: u32::from_le_bytes(word(2)),
            };
            let color = [3, 4, 5].map(|n| f32::from_le_bytes(word(n)));
            let n_source_rays = u32::from_le_bytes(word(6));
            if !color.iter().all(|c| (0.0..=1.0).contains(c)) || n_source_rays == 0 {
                return Err(Error::Format(format!("invalid record for froxel {index:?}")));
            }
            if froxels.insert(index, ReducedFroxel { index, color, n_source_rays }).is_some() {
                return Err(Error::Format(format!("duplicate froxel {index:?}")));
            }
        }
        Ok(ReducedField { cfg, froxels })
    }
}
