//! Froxel-based light-field analysis.
//!
//! The view frustum of a planar camera array is cut into froxels: cells one
//! reference-camera pixel wide and high, and one pixel of disparity deep.
//! Every captured ray is assigned to the froxel it originates from, and the
//! per-froxel ray populations drive statistics ([`binning`]), Lambertian
//! analysis ([`analysis`]), denoising and ray reduction ([`filters`]) and
//! occlusion-aware view synthesis ([`synth`]).

pub mod analysis;
pub mod binning;
pub mod cli;
pub mod error;
pub mod filters;
pub mod lfgeom;
pub mod lfio;
pub mod metrics;
pub mod noise;
pub mod scenegen;
pub mod synth;

pub use binning::{bin_lightfield, Fristogram, FroxelStore, LightField, RaySample};
pub use error::{Error, Result};
pub use lfgeom::{BaselineMode, CameraArrayConfig, CameraId, FroxelIndex, WorldPoint};
pub use lfio::{ColorRaster, DepthRaster};
