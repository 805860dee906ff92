//! Geometry core for multi-view point-scattering 3D object detection.
//!
//! Everything in this crate is pure computation over in-memory data and
//! builds without `std` (an allocator is required). File formats, the
//! experiment pipeline and the command line live in the `psdet` crate.
//!
//! Module map:
//!
//! - [`camera`]: pinhole projection, back-projection and pixel rays.
//! - [`depthcode`]: ordinal depth bins, decoding and depth losses.
//! - [`scenesim`]: synthetic scenes, ray-cast depth/color, 2D boxes, keyframes.
//! - [`scatter`]: per-box strided back-projection with radius deduplication.
//! - [`mvaggregate`]: multi-view feature fetching and masked mean/variance.
//! - [`surfacefilter`]: surface labels, focal loss, photometric scores.
//! - [`voxelgrid`]: sparse voxelization and dense-grid accounting.
//! - [`obb`]: oriented boxes, rotated IoU, NMS and detection losses.
//! - [`evalmetrics`]: AP, recall, Chamfer distance and F-score.
#![no_std]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod camera;
pub mod depthcode;
mod error;
pub mod evalmetrics;
pub mod geometry;
pub mod image;
pub mod mvaggregate;
pub mod obb;
pub mod rng;
pub mod scatter;
pub mod scenesim;
pub mod spatial;
pub mod surfacefilter;
pub mod voxelgrid;

pub use error::{Error, Result};

/// World-space 3-vector in meters.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3x3 matrix, used for rotations.
pub type Mat3 = nalgebra::Matrix3<f64>;
